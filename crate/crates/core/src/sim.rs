//! Monte Carlo simulation of the controlled drawdown at the observation
//! times.
//!
//! Two transition samplers are available. [`Sampler::Euler`] simulates the
//! surplus on a time grid and tracks its running maximum, so it does not use
//! the closed-form drawdown law at all. [`Sampler::ExactInverseCdf`] inverts
//! that closed form and is much faster.
//!
//! Every path draws from its own ChaCha stream selected by `(seed, path)`,
//! so estimates do not depend on how paths are scheduled.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};

use crate::dist::DrawdownLaw;
use crate::error::{Error, Result};
use crate::model::{ModelParams, ObservationScheme, Retention};
use crate::stats::pairwise_sum;

pub type PathRng = ChaCha8Rng;

/// Exponent beyond which the chance that a Brownian bridge overshoots the
/// running maximum (below `e^-50`, so under 1e-17 over 10^5 steps) is ignored.
const BRIDGE_NEGLIGIBLE: f64 = 50.0;

/// Accuracy of the inverse-CDF sampler in the drawdown level.
pub const QUANTILE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampler {
    Euler,
    ExactInverseCdf,
}

/// How the Euler sampler follows the running maximum between grid points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaxTracking {
    /// Maximum over the grid points only. Biased low by about
    /// `0.58 σ √dt`.
    Grid,
    /// Also sample the maximum of the Brownian bridge between consecutive
    /// grid points, which makes the running maximum exact in law.
    Bridge,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathConfig {
    pub n_paths: usize,
    pub dt: f64,
    /// Paths stop at the first observation whose discount factor
    /// `e^{-r T_k}` is below this value; the neglected remainder is at most
    /// `horizon_cutoff` times the value bound.
    pub horizon_cutoff: f64,
    pub seed: u64,
    pub sampler: Sampler,
    pub max_tracking: MaxTracking,
}

impl Default for PathConfig {
    fn default() -> Self {
        Self {
            n_paths: 100_000,
            dt: 1e-4,
            horizon_cutoff: 1e-8,
            seed: 0,
            sampler: Sampler::ExactInverseCdf,
            max_tracking: MaxTracking::Bridge,
        }
    }
}

impl PathConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_paths < 1 {
            return Err(Error::PathConfig("n_paths must be at least 1"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::PathConfig("dt must be positive"));
        }
        if !(self.horizon_cutoff > 0.0 && self.horizon_cutoff < 1.0) {
            return Err(Error::PathConfig("horizon_cutoff must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// Random stream of path number `path`.
pub fn path_rng(seed: u64, path: u64) -> PathRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path);
    rng
}

/// Drawdown after time `t` when starting from `z` with constant retention `b`.
pub fn sample_drawdown_transition<R: Rng + ?Sized>(
    params: &ModelParams,
    z: f64,
    b: Retention,
    t: f64,
    cfg: &PathConfig,
    rng: &mut R,
) -> f64 {
    if !(t > 0.0) {
        return z;
    }
    if b.is_zero() {
        return z + params.cession_speed() * t;
    }
    match cfg.sampler {
        Sampler::Euler => euler_transition(params, z, b, t, cfg, rng),
        Sampler::ExactInverseCdf => {
            let law = DrawdownLaw::new(params, z, b, t).expect("t > 0 and z >= 0 were checked");
            let u: f64 = rng.random();
            law.quantile(u, QUANTILE_TOL).expect("u lies in [0, 1)")
        }
    }
}

fn euler_transition<R: Rng + ?Sized>(
    params: &ModelParams,
    z: f64,
    b: Retention,
    t: f64,
    cfg: &PathConfig,
    rng: &mut R,
) -> f64 {
    let steps = libm::ceil(t / cfg.dt).max(1.0);
    let h = t / steps;
    let drift = params.drift(b) * h;
    let sd = params.vol(b) * libm::sqrt(h);
    let var = sd * sd;
    // Surplus starts at 0 with running maximum z.
    let mut x = 0.0;
    let mut top = z;
    for _ in 0..steps as u64 {
        let noise: f64 = rng.sample(StandardNormal);
        let next = x + drift + sd * noise;
        if next > top {
            top = next;
        }
        if cfg.max_tracking == MaxTracking::Bridge {
            // The bridge maximum M satisfies P(M > m) = exp(-2(m - x)(m - next)/var)
            // for m above both ends; it only matters when it exceeds `top`.
            let gap = 2.0 * (top - x) * (top - next) / var;
            if gap < BRIDGE_NEGLIGIBLE {
                let u = 1.0 - rng.random::<f64>();
                if u < libm::exp(-gap) {
                    let dx = next - x;
                    top = 0.5 * (x + next + libm::sqrt(dx * dx - 2.0 * var * libm::log(u)));
                }
            }
        }
        x = next;
    }
    top - x
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathOutcome {
    /// `Σ e^{-r T_k} 1{Δ(T_k) > d}` over the simulated observations.
    pub discounted_count: f64,
    /// Number of observations before truncation, including `T_0 = 0`.
    pub epochs: u32,
}

/// Simulate one path of the drawdown under a feedback policy.
pub fn simulate_path<R, P>(
    z0: f64,
    policy: P,
    scheme: ObservationScheme,
    params: &ModelParams,
    cfg: &PathConfig,
    rng: &mut R,
) -> PathOutcome
where
    R: Rng + ?Sized,
    P: Fn(f64) -> Retention,
{
    let gaps = match scheme {
        ObservationScheme::Poisson { rho } => Some(Exp::new(rho).expect("rho > 0")),
        ObservationScheme::Deterministic { .. } => None,
    };
    let mut time = 0.0;
    let mut z = z0;
    let mut total = 0.0;
    let mut epochs = 0u32;
    loop {
        let discount = libm::exp(-params.r() * time);
        if discount < cfg.horizon_cutoff {
            break;
        }
        if z > params.d() {
            total += discount;
        }
        epochs += 1;
        let b = policy(z);
        let gap = match (&gaps, scheme) {
            (Some(exp), _) => exp.sample(rng),
            (None, ObservationScheme::Deterministic { period }) => period,
            (None, ObservationScheme::Poisson { .. }) => unreachable!(),
        };
        z = sample_drawdown_transition(params, z, b, gap, cfg, rng);
        time += gap;
    }
    PathOutcome {
        discounted_count: total,
        epochs,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolicyEstimate {
    pub mean: f64,
    pub std_err: f64,
    pub n_terms_avg: f64,
    pub n_paths: usize,
}

/// Mean, standard error and average path length of a batch of outcomes.
pub fn summarize(outcomes: &[PathOutcome]) -> PolicyEstimate {
    use alloc::vec::Vec;
    let n = outcomes.len();
    let values: Vec<f64> = outcomes.iter().map(|o| o.discounted_count).collect();
    let mean = pairwise_sum(&values) / n as f64;
    let sq: Vec<f64> = values.iter().map(|x| (x - mean) * (x - mean)).collect();
    let var = if n > 1 { pairwise_sum(&sq) / (n - 1) as f64 } else { 0.0 };
    let epochs: Vec<f64> = outcomes.iter().map(|o| o.epochs as f64).collect();
    PolicyEstimate {
        mean,
        std_err: libm::sqrt(var / n as f64),
        n_terms_avg: pairwise_sum(&epochs) / n as f64,
        n_paths: n,
    }
}

/// Estimate the policy value `v^B(z0)` from `cfg.n_paths` paths, one after
/// the other. The `drawdown` crate provides a parallel driver with identical
/// output.
pub fn estimate_value<P>(
    z0: f64,
    policy: P,
    scheme: ObservationScheme,
    params: &ModelParams,
    cfg: &PathConfig,
) -> Result<PolicyEstimate>
where
    P: Fn(f64) -> Retention,
{
    cfg.validate()?;
    scheme.validate()?;
    if !(z0 >= 0.0 && z0.is_finite()) {
        return Err(Error::Domain("initial drawdown must be non-negative"));
    }
    let outcomes: alloc::vec::Vec<PathOutcome> = (0..cfg.n_paths as u64)
        .map(|i| simulate_path(z0, &policy, scheme, params, cfg, &mut path_rng(cfg.seed, i)))
        .collect();
    Ok(summarize(&outcomes))
}
