//! Drawdown and retention grids for value iteration.
//!
//! Poisson observations use a uniform grid on `[0, a]`. Deterministic
//! observations need `z + (θ - η)T` to land on a node again, so the grid is
//! built from a base block on `[0, (θ - η)T)` replicated `K` times; the
//! full-cession branch then becomes an exact index shift. In both cases the
//! critical level `d` and a node just above it are inserted so that the jump
//! of `1{z > d}` is resolved.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{ModelParams, ObservationScheme, Retention};

/// Relative offset of the node placed immediately above `d`.
pub const JUMP_OFFSET: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    /// Poisson: number of uniform intervals on `[0, a]`. Deterministic:
    /// number of uniform base points per block of length `(θ - η)T`.
    pub n_base: usize,
    /// Deterministic only: number of solved blocks `K`. One further block is
    /// pinned to the upper bound.
    pub k_bands: usize,
    /// Number of retention intervals; the retention grid is `j / M`.
    pub m_retention: usize,
    /// Sup-norm stopping tolerance.
    pub eps: f64,
    /// Poisson only: truncation level `a`, default `8 d`.
    pub truncation: Option<f64>,
    pub max_iters: Option<usize>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            n_base: 300,
            k_bands: 20,
            m_retention: 50,
            eps: 1e-6,
            truncation: None,
            max_iters: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Layout {
    Free,
    /// `z[k + block] = z[k] + shift` for every `k < solved`.
    Replicated {
        block: usize,
        solved: usize,
        shift: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveGrid {
    params: ModelParams,
    scheme: ObservationScheme,
    z_nodes: Vec<f64>,
    b_nodes: Vec<Retention>,
    truncation: f64,
    eps: f64,
    max_iters: usize,
    layout: Layout,
    critical: usize,
}

impl SolveGrid {
    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn scheme(&self) -> ObservationScheme {
        self.scheme
    }

    pub fn z_nodes(&self) -> &[f64] {
        &self.z_nodes
    }

    pub fn b_nodes(&self) -> &[Retention] {
        &self.b_nodes
    }

    /// Right end `a` of the grid; beyond it values are replaced by the bound.
    pub fn truncation(&self) -> f64 {
        self.truncation
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn max_iters(&self) -> usize {
        self.max_iters
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    /// Index of the node equal to `d`; the next node lies just above it.
    pub fn critical_index(&self) -> usize {
        self.critical
    }

    /// Number of leading nodes updated by value iteration. Nodes from here on
    /// are pinned to the upper bound.
    pub fn solved_len(&self) -> usize {
        match self.layout {
            Layout::Free => self.z_nodes.len(),
            Layout::Replicated { solved, .. } => solved,
        }
    }

    pub fn ell(&self) -> f64 {
        self.scheme.laplace_interarrival(self.params.r())
    }

    pub fn bound(&self) -> f64 {
        self.scheme.value_upper_bound(self.params.r())
    }
}

/// Number of sweeps after which a contraction with factor `ell`, started at
/// distance at most `bound`, has a step below `eps`.
pub fn sweep_estimate(ell: f64, bound: f64, eps: f64) -> usize {
    let n = libm::ceil(libm::log(eps * (1.0 - ell) / bound) / libm::log(ell));
    n.max(0.0) as usize + 1
}

fn merge_levels(mut nodes: Vec<f64>, extra: &[f64], tol: f64) -> Vec<f64> {
    nodes.retain(|x| extra.iter().all(|e| libm::fabs(x - e) > tol));
    nodes.extend_from_slice(extra);
    nodes.sort_by(f64::total_cmp);
    nodes.dedup();
    nodes
}

pub fn build_grid(params: &ModelParams, scheme: ObservationScheme, spec: &GridSpec) -> Result<SolveGrid> {
    scheme.validate()?;
    if spec.n_base < 2 {
        return Err(Error::Grid(format!("n_base must be at least 2, got {}", spec.n_base)));
    }
    if spec.m_retention < 1 {
        return Err(Error::Grid("at least two retention levels are required".into()));
    }
    if !(spec.eps > 0.0 && spec.eps.is_finite()) {
        return Err(Error::Grid("eps must be positive".into()));
    }
    let d = params.d();
    let d_plus = d * (1.0 + JUMP_OFFSET);

    let (z_nodes, layout) = match scheme {
        ObservationScheme::Poisson { .. } => {
            let a = spec.truncation.unwrap_or(8.0 * d);
            if !(a.is_finite() && a > d_plus) {
                return Err(Error::Grid(format!("truncation a = {a} must exceed d = {d}")));
            }
            let n = spec.n_base;
            let uniform: Vec<f64> = (0..=n).map(|i| if i == n { a } else { a * i as f64 / n as f64 }).collect();
            let tol = 1e-3 * a / n as f64;
            (merge_levels(uniform, &[d, d_plus], tol), Layout::Free)
        }
        ObservationScheme::Deterministic { period } => {
            if spec.k_bands < 1 {
                return Err(Error::Grid("k_bands must be at least 1".into()));
            }
            let shift = params.cession_speed() * period;
            let n = spec.n_base;
            let uniform: Vec<f64> = (0..n).map(|i| shift * i as f64 / n as f64).collect();
            let tol = 1e-3 * shift / n as f64;
            let mut offset = d - libm::floor(d / shift) * shift;
            if offset >= shift - tol {
                offset = 0.0;
            }
            let offset_plus = offset + d * JUMP_OFFSET;
            if offset_plus >= shift {
                return Err(Error::Grid("d sits too close to a block boundary".into()));
            }
            let base = merge_levels(uniform, &[offset, offset_plus], tol);
            let block = base.len();
            let k = spec.k_bands;
            let mut nodes = Vec::with_capacity(block * (k + 1));
            for j in 0..=k {
                nodes.extend(base.iter().map(|x| x + j as f64 * shift));
            }
            // Exact d and d+ nodes; the shift map stays structural.
            let snap = 0.25 * d * JUMP_OFFSET;
            for x in nodes.iter_mut() {
                if libm::fabs(*x - d_plus) <= snap {
                    *x = d_plus;
                } else if libm::fabs(*x - d) <= snap {
                    *x = d;
                }
            }
            let solved = block * k;
            (
                nodes,
                Layout::Replicated {
                    block,
                    solved,
                    shift,
                },
            )
        }
    };

    let critical = z_nodes
        .iter()
        .position(|&x| x == d)
        .ok_or_else(|| Error::Grid("critical level is not a grid node".into()))?;
    let solved = match layout {
        Layout::Free => z_nodes.len(),
        Layout::Replicated { solved, .. } => solved,
    };
    if critical + 1 >= solved || z_nodes[critical + 1] != d_plus {
        return Err(Error::Grid(format!(
            "solved range ends at {} and does not resolve the jump at d = {d}; increase k_bands or a",
            z_nodes[solved - 1]
        )));
    }

    let m = spec.m_retention;
    let b_nodes = (0..=m)
        .map(|j| Retention::new(if j == m { 1.0 } else { j as f64 / m as f64 }))
        .collect::<Result<Vec<_>>>()?;

    let ell = scheme.laplace_interarrival(params.r());
    let bound = scheme.value_upper_bound(params.r());
    let max_iters = spec.max_iters.unwrap_or_else(|| 10 * sweep_estimate(ell, bound, spec.eps));
    let truncation = *z_nodes.last().expect("grid is never empty");

    Ok(SolveGrid {
        params: *params,
        scheme,
        z_nodes,
        b_nodes,
        truncation,
        eps: spec.eps,
        max_iters,
        layout,
        critical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_params() -> ModelParams {
        ModelParams::reference(4.0).unwrap()
    }

    #[test]
    fn poisson_grid_has_uniform_nodes_and_jump_pair() {
        let g = build_grid(&reference_params(), ObservationScheme::poisson(1.0).unwrap(), &GridSpec::default()).unwrap();
        assert_eq!(g.truncation(), 40.0);
        // 301 uniform nodes with spacing 2/15, plus d and d+.
        assert_eq!(g.z_nodes().len(), 303);
        let c = g.critical_index();
        assert_eq!(g.z_nodes()[c], 5.0);
        assert_eq!(g.z_nodes()[c + 1], 5.0 * (1.0 + JUMP_OFFSET));
        assert!(g.z_nodes().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(g.z_nodes()[0], 0.0);
        assert_eq!(g.b_nodes().len(), 51);
        assert_eq!(g.b_nodes()[0], Retention::ZERO);
        assert_eq!(g.b_nodes()[50], Retention::FULL);
    }

    #[test]
    fn deterministic_grid_is_replicated() {
        let spec = GridSpec {
            n_base: 10,
            k_bands: 20,
            ..GridSpec::default()
        };
        let g = build_grid(&reference_params(), ObservationScheme::deterministic(1.0).unwrap(), &spec).unwrap();
        let Layout::Replicated { block, solved, shift } = g.layout() else {
            panic!("expected replicated layout")
        };
        assert_eq!(shift, 1.0);
        // d = 5 falls on an existing base point; only d+ is added.
        assert_eq!(block, 11);
        assert_eq!(solved, 20 * block);
        assert_eq!(g.z_nodes().len(), 21 * block);
        for k in 0..solved {
            let z = g.z_nodes();
            assert!((z[k + block] - (z[k] + 1.0)).abs() < 1e-12);
        }
        assert!(g.z_nodes().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn deterministic_grid_with_offset_critical_level() {
        let p = ModelParams::reference(6.0).unwrap();
        let spec = GridSpec {
            n_base: 12,
            k_bands: 4,
            ..GridSpec::default()
        };
        let g = build_grid(&p, ObservationScheme::deterministic(1.0).unwrap(), &spec).unwrap();
        assert_eq!(g.z_nodes()[g.critical_index()], 5.0);
        let Layout::Replicated { block, solved, .. } = g.layout() else { unreachable!() };
        for k in 0..solved {
            let z = g.z_nodes();
            assert!((z[k + block] - (z[k] + 3.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_degenerate_requests() {
        let p = reference_params();
        let det = ObservationScheme::deterministic(1.0).unwrap();
        let spec = GridSpec {
            n_base: 10,
            k_bands: 0,
            ..GridSpec::default()
        };
        assert!(build_grid(&p, det, &spec).is_err());
        // Solved range [0, 4) does not contain d = 5.
        let spec = GridSpec {
            n_base: 10,
            k_bands: 4,
            ..GridSpec::default()
        };
        assert!(build_grid(&p, det, &spec).is_err());
        let spec = GridSpec {
            truncation: Some(4.0),
            ..GridSpec::default()
        };
        assert!(build_grid(&p, ObservationScheme::poisson(1.0).unwrap(), &spec).is_err());
        let spec = GridSpec {
            n_base: 1,
            ..GridSpec::default()
        };
        assert!(build_grid(&p, ObservationScheme::poisson(1.0).unwrap(), &spec).is_err());
    }

    #[test]
    fn sweep_estimate_matches_geometric_bound() {
        assert_eq!(sweep_estimate(1.0 / 1.3, 13.0 / 3.0, 1e-6), 65);
    }
}
