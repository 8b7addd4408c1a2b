//! Value iteration for the dynamic programming equation
//!
//! ```text
//! v(z) = 1{z > d} + min_b E[e^{-r T1} v(Δ_z^b(T1))]
//! ```
//!
//! on a [`SolveGrid`]. Between nodes `v` is interpolated linearly, so for
//! every node `z_k` and retention `b_j` the expectation collapses to a fixed
//! weight vector over the nodes plus a tail weight that multiplies the upper
//! bound. Those weights do not depend on `v`; they are computed once and
//! reused by every sweep.

use alloc::boxed::Box;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::dist::DrawdownLaw;
use crate::error::{Error, Result};
use crate::grid::{Layout, SolveGrid};
use crate::kernel::PoissonKernel;
use crate::model::{ObservationScheme, Retention};

/// Slack allowed above the upper bound before a sweep is treated as broken.
const BOUND_SLACK: f64 = 1e-9;

/// Mass that may be dropped from each end of a weight row.
const TRIM_MASS: f64 = 1e-16;

/// Largest number of kernel evaluations accepted when building the weights.
pub const MAX_KERNEL_EVALS: usize = 400_000_000;

/// The nonzero stretch `weights` of a weight row, starting at node `start`.
#[derive(Debug, Clone, Default)]
struct Band {
    start: usize,
    weights: Vec<f64>,
}

impl Band {
    fn from_row(row: &[f64]) -> Self {
        let mut lo = 0;
        let mut dropped = 0.0;
        while lo < row.len() && dropped + row[lo] <= TRIM_MASS {
            dropped += row[lo];
            lo += 1;
        }
        let mut hi = row.len();
        dropped = 0.0;
        while hi > lo && dropped + row[hi - 1] <= TRIM_MASS {
            dropped += row[hi - 1];
            hi -= 1;
        }
        Self {
            start: lo,
            weights: row[lo..hi].to_vec(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Bellman {
    grid: SolveGrid,
    branches: usize,
    bands: Vec<Band>,
    tails: Vec<f64>,
    bound: f64,
}

/// Spread the masses of cells `[z_{i-1}, z_i]` onto their end nodes.
fn trapezoid(row: &mut [f64], cells: impl Iterator<Item = f64>) {
    for (i, w) in cells.enumerate() {
        row[i] += 0.5 * w;
        row[i + 1] += 0.5 * w;
    }
}

impl Bellman {
    pub fn new(grid: &SolveGrid) -> Result<Self> {
        let z = grid.z_nodes();
        let nodes = z.len();
        let solved = grid.solved_len();
        let branches = grid.b_nodes().len();
        if solved.saturating_mul(branches).saturating_mul(nodes) > MAX_KERNEL_EVALS {
            return Err(Error::Grid(format!(
                "{solved} solved nodes x {branches} retentions x {nodes} nodes exceeds {MAX_KERNEL_EVALS} kernel evaluations"
            )));
        }
        // Pinned nodes keep the bound and need no weights.
        let mut bands = vec![Band::default(); nodes * branches];
        let mut tails = vec![0.0; nodes * branches];
        let mut row = vec![0.0; nodes];
        let a = grid.truncation();
        let ell = grid.ell();

        match grid.scheme() {
            ObservationScheme::Poisson { rho } => {
                let kernel = PoissonKernel::new(*grid.params(), rho)?;
                let shapes: Vec<_> = grid.b_nodes().iter().map(|&b| kernel.shape(b)).collect();
                for (k, &zk) in z.iter().enumerate().take(solved) {
                    for (j, shape) in shapes.iter().enumerate() {
                        let slot = k * branches + j;
                        row.fill(0.0);
                        trapezoid(&mut row, z.windows(2).map(|c| shape.cell(zk, c[0], c[1])));
                        bands[slot] = Band::from_row(&row);
                        tails[slot] = shape.tail(zk, a);
                    }
                }
            }
            ObservationScheme::Deterministic { period } => {
                let Layout::Replicated { block, .. } = grid.layout() else {
                    return Err(Error::Grid("deterministic scheme requires a replicated grid".into()));
                };
                let mut cdf = vec![0.0; nodes];
                for (k, &zk) in z.iter().enumerate().take(solved) {
                    for (j, &b) in grid.b_nodes().iter().enumerate() {
                        let slot = k * branches + j;
                        if b.is_zero() {
                            // The drawdown moves to z_k + (θ-η)T, which is node k + block.
                            if k + block < nodes {
                                bands[slot] = Band {
                                    start: k + block,
                                    weights: vec![ell],
                                };
                            } else {
                                tails[slot] = ell;
                            }
                            continue;
                        }
                        let law = DrawdownLaw::new(grid.params(), zk, b, period)?;
                        for (f, &zi) in cdf.iter_mut().zip(z) {
                            *f = law.cdf_unchecked(zi);
                        }
                        row.fill(0.0);
                        row[0] += ell * cdf[0];
                        trapezoid(&mut row, cdf.windows(2).map(|c| ell * (c[1] - c[0]).max(0.0)));
                        bands[slot] = Band::from_row(&row);
                        tails[slot] = ell * (1.0 - cdf[nodes - 1]);
                    }
                }
            }
        }

        Ok(Self {
            grid: grid.clone(),
            branches,
            bands,
            tails,
            bound: grid.bound(),
        })
    }

    pub fn grid(&self) -> &SolveGrid {
        &self.grid
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    /// Node weights of branch `j` at node `k`, as the index of the first
    /// node and the weights from there on. Weights outside the returned
    /// stretch are zero up to a negligible trimmed mass.
    pub fn row(&self, k: usize, j: usize) -> (usize, &[f64]) {
        let band = &self.bands[k * self.branches + j];
        (band.start, &band.weights)
    }

    /// Weight on the upper bound (mass beyond the grid) of branch `j` at node `k`.
    pub fn tail(&self, k: usize, j: usize) -> f64 {
        self.tails[k * self.branches + j]
    }

    /// Continuation value of every branch at node `k`.
    pub fn branch_values(&self, k: usize, v: &[f64]) -> Vec<f64> {
        (0..self.branches)
            .map(|j| self.continuation(k, j, v))
            .collect()
    }

    fn continuation(&self, k: usize, j: usize, v: &[f64]) -> f64 {
        let (start, row) = self.row(k, j);
        let inner: f64 = row.iter().zip(&v[start..]).map(|(w, x)| w * x).sum();
        inner + self.tail(k, j) * self.bound
    }

    /// One node of the operator: the new value and the minimising branch.
    /// Ties go to the smaller retention.
    pub fn apply_node(&self, k: usize, v: &[f64]) -> (f64, usize) {
        let mut best = f64::INFINITY;
        let mut arg = 0;
        for j in 0..self.branches {
            let c = self.continuation(k, j, v);
            if c < best {
                best = c;
                arg = j;
            }
        }
        let penalty = if self.grid.z_nodes()[k] > self.grid.params().d() { 1.0 } else { 0.0 };
        (penalty + best, arg)
    }

    /// Apply the operator to `v`. Pinned nodes keep the upper bound and
    /// report full retention.
    pub fn apply(&self, v: &[f64]) -> Result<(Vec<f64>, Vec<usize>)> {
        let nodes = self.nodes();
        assert_eq!(v.len(), nodes, "value vector must have one entry per node");
        let solved = self.grid.solved_len();
        let mut out = Vec::with_capacity(nodes);
        let mut args = Vec::with_capacity(nodes);
        for k in 0..solved {
            let (value, arg) = self.apply_node(k, v);
            out.push(self.checked(k, value)?);
            args.push(arg);
        }
        out.resize(nodes, self.bound);
        args.resize(nodes, self.branches - 1);
        Ok((out, args))
    }

    fn nodes(&self) -> usize {
        self.grid.z_nodes().len()
    }

    fn checked(&self, index: usize, value: f64) -> Result<f64> {
        // Weights sum to ℓ, so only rounding can push a value past the bound.
        if !(value >= 0.0 && value <= self.bound * (1.0 + BOUND_SLACK)) {
            return Err(Error::BoundViolation {
                index,
                value,
                bound: self.bound,
            });
        }
        Ok(value.min(self.bound))
    }

    /// Fixed-point iteration from `v = 0` until the sup-norm step drops below
    /// the grid tolerance.
    pub fn iterate(&self) -> Result<Solution> {
        let mut v = vec![0.0; self.nodes()];
        let mut args = vec![0; self.nodes()];
        let mut history = Vec::new();
        let eps = self.grid.eps();
        let mut converged = false;
        for _ in 0..self.grid.max_iters() {
            let (next, next_args) = self.apply(&v)?;
            let step = next
                .iter()
                .zip(&v)
                .map(|(a, b)| libm::fabs(a - b))
                .fold(0.0, f64::max);
            history.push(step);
            v = next;
            args = next_args;
            if step < eps {
                converged = true;
                break;
            }
        }
        let b = self.grid.b_nodes();
        let solution = Solution {
            z: self.grid.z_nodes().to_vec(),
            v,
            b_star: args.into_iter().map(|j| b[j]).collect(),
            iterations: history.len(),
            residual: history.last().copied().unwrap_or(f64::INFINITY),
            residual_history: history,
            bound: self.bound,
            ell: self.grid.ell(),
            critical_index: self.grid.critical_index(),
        };
        if converged {
            Ok(solution)
        } else {
            Err(Error::NonConvergence {
                iterations: solution.iterations,
                residual: solution.residual,
                partial: Box::new(solution),
            })
        }
    }
}

/// One application of the operator; builds the weight tables on the fly.
pub fn bellman_apply(grid: &SolveGrid, v: &[f64]) -> Result<(Vec<f64>, Vec<Retention>)> {
    if v.len() != grid.z_nodes().len() {
        return Err(Error::Domain("value vector must have one entry per node"));
    }
    let op = Bellman::new(grid)?;
    let (out, args) = op.apply(v)?;
    let b = grid.b_nodes();
    Ok((out, args.into_iter().map(|j| b[j]).collect()))
}

pub fn solve(grid: &SolveGrid) -> Result<Solution> {
    Bellman::new(grid)?.iterate()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub z: Vec<f64>,
    pub v: Vec<f64>,
    pub b_star: Vec<Retention>,
    pub iterations: usize,
    pub residual: f64,
    pub residual_history: Vec<f64>,
    pub bound: f64,
    pub ell: f64,
    pub critical_index: usize,
}

impl Solution {
    /// Ratios of consecutive sup-norm steps.
    pub fn contraction_ratios(&self) -> Vec<f64> {
        self.residual_history
            .windows(2)
            .filter(|w| w[0] > 0.0)
            .map(|w| w[1] / w[0])
            .collect()
    }

    /// Size of the jump of `v` across the critical level.
    pub fn jump_at_critical(&self) -> f64 {
        self.v[self.critical_index + 1] - self.v[self.critical_index]
    }

    pub fn policy(&self) -> FeedbackPolicy {
        FeedbackPolicy {
            z: self.z.clone(),
            b: self.b_star.clone(),
        }
    }

    pub fn policy_at(&self, z: f64) -> Retention {
        lookup(&self.z, &self.b_star, z)
    }
}

fn lookup(z: &[f64], b: &[Retention], at: f64) -> Retention {
    let k = z.partition_point(|&x| x < at);
    b[k.min(b.len() - 1)]
}

/// Retention as a left-continuous step function of the observed drawdown:
/// on `(z_{k-1}, z_k]` the value at `z_k` applies, beyond the last node the
/// last value.
#[derive(Debug, Clone, PartialEq)]
pub struct FeedbackPolicy {
    z: Vec<f64>,
    b: Vec<Retention>,
}

impl FeedbackPolicy {
    pub fn new(z: Vec<f64>, b: Vec<Retention>) -> Result<Self> {
        if z.is_empty() || z.len() != b.len() {
            return Err(Error::Domain("policy table needs matching, non-empty columns"));
        }
        if !z.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Domain("policy nodes must be strictly increasing"));
        }
        Ok(Self { z, b })
    }

    pub fn constant(b: Retention) -> Self {
        Self {
            z: vec![0.0],
            b: vec![b],
        }
    }

    pub fn at(&self, z: f64) -> Retention {
        lookup(&self.z, &self.b, z)
    }
}
