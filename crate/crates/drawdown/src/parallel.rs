//! Rayon drivers for the Monte Carlo routines of `drawdown-core`.
//!
//! Each path owns the random stream `(seed, path)` and results are reduced
//! in path order, so output does not depend on the number of threads.

use drawdown_core::sim::{path_rng, sample_drawdown_transition, simulate_path, summarize};
use drawdown_core::{ModelParams, ObservationScheme, PathConfig, PolicyEstimate, Retention};
use rayon::prelude::*;

/// Parallel counterpart of [`drawdown_core::sim::estimate_value`]; returns
/// bitwise the same estimate.
pub fn estimate_value<P>(
    z0: f64,
    policy: P,
    scheme: ObservationScheme,
    params: &ModelParams,
    cfg: &PathConfig,
) -> drawdown_core::Result<PolicyEstimate>
where
    P: Fn(f64) -> Retention + Sync,
{
    cfg.validate()?;
    scheme.validate()?;
    if !(z0 >= 0.0 && z0.is_finite()) {
        return Err(drawdown_core::Error::Domain("initial drawdown must be non-negative"));
    }
    let outcomes: Vec<_> = (0..cfg.n_paths as u64)
        .into_par_iter()
        .map(|i| simulate_path(z0, &policy, scheme, params, cfg, &mut path_rng(cfg.seed, i)))
        .collect();
    Ok(summarize(&outcomes))
}

/// `cfg.n_paths` draws of the drawdown after time `t`, using streams
/// `stream_base + i`.
pub fn sample_transitions(
    params: &ModelParams,
    z: f64,
    b: Retention,
    t: f64,
    cfg: &PathConfig,
    stream_base: u64,
) -> Vec<f64> {
    (0..cfg.n_paths as u64)
        .into_par_iter()
        .map(|i| sample_drawdown_transition(params, z, b, t, cfg, &mut path_rng(cfg.seed, stream_base + i)))
        .collect()
}
