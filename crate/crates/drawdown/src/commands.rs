//! The four subcommands. Each writes its artifacts into an output directory
//! and returns what it wrote, so tests can drive them without a process.

use std::path::{Path, PathBuf};

use drawdown_core::stats::ks_statistic;
use drawdown_core::{build_grid, solve, DrawdownLaw, Layout, Retention, Sampler, Solution, SolveGrid};
use serde::Serialize;

use crate::config::{GridConfig, ModelConfig, RunConfig, SchemeConfig};
use crate::error::CliError;
use crate::io::{self, EstimateRow, KsRow};
use crate::parallel;

/// Tolerance of the monotonicity check on solved values.
pub const MONOTONE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Serialize)]
pub struct GridMeta {
    pub nodes: usize,
    pub solved_nodes: usize,
    pub retentions: usize,
    pub truncation: f64,
    pub eps: f64,
    pub max_iters: usize,
    pub critical_index: usize,
    pub layout: &'static str,
    /// Deterministic grids: nodes per band.
    pub band: Option<usize>,
}

impl GridMeta {
    fn new(grid: &SolveGrid) -> Self {
        let band = match grid.layout() {
            Layout::Replicated { block, .. } => Some(block),
            Layout::Free => None,
        };
        Self {
            nodes: grid.z_nodes().len(),
            solved_nodes: grid.solved_len(),
            retentions: grid.b_nodes().len(),
            truncation: grid.truncation(),
            eps: grid.eps(),
            max_iters: grid.max_iters(),
            critical_index: grid.critical_index(),
            layout: if band.is_some() { "replicated" } else { "free" },
            band,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    pub converged: bool,
    pub iterations: usize,
    pub residual: f64,
    pub residual_history: Vec<f64>,
    pub contraction_ratios: Vec<f64>,
    pub max_contraction_ratio: Option<f64>,
    pub discount: f64,
    pub bound: f64,
    pub jump_at_critical: f64,
    pub model: ModelConfig,
    pub scheme: SchemeConfig,
    pub grid: GridMeta,
}

impl Diagnostics {
    fn new(solution: &Solution, converged: bool, model: ModelConfig, scheme: SchemeConfig, grid: &SolveGrid) -> Self {
        let ratios = solution.contraction_ratios();
        Self {
            converged,
            iterations: solution.iterations,
            residual: solution.residual,
            residual_history: solution.residual_history.clone(),
            max_contraction_ratio: ratios.iter().copied().reduce(f64::max),
            contraction_ratios: ratios,
            discount: solution.ell,
            bound: solution.bound,
            jump_at_critical: solution.jump_at_critical(),
            model,
            scheme,
            grid: GridMeta::new(grid),
        }
    }
}

fn build(model: &ModelConfig, scheme: &SchemeConfig, grid: &GridConfig) -> Result<SolveGrid, CliError> {
    let params = model.params()?;
    let scheme = scheme.scheme()?;
    build_grid(&params, scheme, &grid.spec()).map_err(|e| CliError::Config(e.to_string()))
}

/// Solve, returning the solution (partial when iteration did not converge)
/// and whether it converged.
fn solve_grid(grid: &SolveGrid) -> Result<(Solution, bool), CliError> {
    match solve(grid) {
        Ok(s) => Ok((s, true)),
        Err(drawdown_core::Error::NonConvergence { partial, .. }) => Ok((*partial, false)),
        Err(e) => Err(e.into()),
    }
}

/// `solution.csv` and `diagnostics.json`. On non-convergence only the
/// diagnostics are written.
pub fn run_solve(cfg: &RunConfig, out: &Path) -> Result<Solution, CliError> {
    let grid = build(&cfg.model, &cfg.scheme, &cfg.grid)?;
    let (solution, converged) = solve_grid(&grid)?;
    io::ensure_dir(out)?;
    let diagnostics = Diagnostics::new(&solution, converged, cfg.model, cfg.scheme, &grid);
    io::write_json(&out.join("diagnostics.json"), &diagnostics)?;
    if !converged {
        return Err(CliError::NonConvergence(format!(
            "{} sweeps, residual {:e}",
            solution.iterations, solution.residual
        )));
    }
    io::write_solution(&out.join("solution.csv"), &solution)?;
    Ok(solution)
}

#[derive(Debug, Clone, PartialEq)]
pub enum PolicySource {
    Solution(PathBuf),
    Constant(f64),
}

/// `estimate.csv`: Monte Carlo value of a policy at each configured `z0`.
pub fn run_simulate(cfg: &RunConfig, source: &PolicySource, seed: u64, out: &Path) -> Result<Vec<EstimateRow>, CliError> {
    let params = cfg.params()?;
    let scheme = cfg.scheme()?;
    let path_cfg = cfg.sim.path_config(seed)?;
    let policy: Box<dyn Fn(f64) -> Retention + Sync> = match source {
        PolicySource::Solution(path) => {
            let policy = io::read_policy(path)?;
            Box::new(move |z| policy.at(z))
        }
        PolicySource::Constant(b) => {
            let b = Retention::new(*b).map_err(|e| CliError::Config(e.to_string()))?;
            Box::new(move |_| b)
        }
    };
    let mut rows = Vec::with_capacity(cfg.sim.z0.len());
    for &z0 in &cfg.sim.z0 {
        let est = parallel::estimate_value(z0, &policy, scheme, &params, &path_cfg)?;
        rows.push(EstimateRow {
            z0,
            mean: est.mean,
            std_err: est.std_err,
            n_paths: est.n_paths,
        });
    }
    io::ensure_dir(out)?;
    io::write_csv(&out.join("estimate.csv"), &rows)?;
    Ok(rows)
}

/// `ks_report.csv`: Euler samples of the drawdown against the closed-form
/// law over the configured `(b, z, t)` grid. Fails when any cell misses the
/// threshold; a `b = 0` cell passes only if every sample hits the atom.
pub fn run_validate_dist(cfg: &RunConfig, seed: u64, out: &Path) -> Result<Vec<KsRow>, CliError> {
    let params = cfg.params()?;
    let v = &cfg.validate;
    v.check()?;
    let mut path_cfg = cfg.sim.path_config(seed)?;
    path_cfg.n_paths = v.n_paths;
    path_cfg.dt = v.dt;
    path_cfg.sampler = Sampler::Euler;
    path_cfg.max_tracking = match v.max_tracking {
        crate::config::MaxTrackingConfig::Grid => drawdown_core::sim::MaxTracking::Grid,
        crate::config::MaxTrackingConfig::Bridge => drawdown_core::sim::MaxTracking::Bridge,
    };
    let mut rows = Vec::new();
    let mut cell = 0u64;
    for &b in &v.b {
        let retention = Retention::new(b).map_err(|e| CliError::Config(e.to_string()))?;
        for &z in &v.z {
            for &t in &v.t {
                let mut samples = parallel::sample_transitions(&params, z, retention, t, &path_cfg, cell << 32);
                cell += 1;
                let law = DrawdownLaw::new(&params, z, retention, t)?;
                let (ks_stat, pass) = match law.atom() {
                    Some(atom) => {
                        let hit = samples.iter().all(|&x| x == atom);
                        (if hit { 0.0 } else { 1.0 }, hit)
                    }
                    None => {
                        let ks = ks_statistic(&mut samples, |x| law.cdf(x.max(0.0)).unwrap_or(0.0));
                        (ks, ks <= v.threshold)
                    }
                };
                eprintln!("b={b} z={z} t={t}: ks={ks_stat:.5} {}", if pass { "pass" } else { "FAIL" });
                rows.push(KsRow {
                    b,
                    z,
                    t,
                    ks_stat,
                    n_paths: v.n_paths,
                    dt: v.dt,
                    pass,
                });
            }
        }
    }
    io::ensure_dir(out)?;
    io::write_csv(&out.join("ks_report.csv"), &rows)?;
    let failed = rows.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        return Err(CliError::ValidationFailed {
            failed,
            total: rows.len(),
        });
    }
    Ok(rows)
}

/// Smallest grid level `z̄ <= d` such that `b* = 1` on every node of
/// `[z̄, d]`, or `None` when `b*(d) < 1`.
pub fn full_retention_threshold(solution: &Solution, d: f64) -> Option<f64> {
    let top = solution.z.iter().rposition(|&z| z <= d)?;
    let mut first = None;
    for k in (0..=top).rev() {
        if solution.b_star[k] != Retention::FULL {
            break;
        }
        first = Some(solution.z[k]);
    }
    first
}

#[derive(Debug, Clone, Serialize)]
pub struct VariantSummary {
    pub name: String,
    pub file: String,
    pub theta: f64,
    pub scheme: SchemeConfig,
    pub converged: bool,
    pub iterations: usize,
    pub residual: f64,
    pub bound: f64,
    pub v_at_truncation: f64,
    pub monotone: bool,
    pub jump_at_critical: f64,
    pub jump_is_one: bool,
    pub b_star_at_zero: f64,
    /// Start of the stretch below `d` on which `b* = 1`.
    pub full_retention_from: Option<f64>,
    /// Poisson variants: the stretch exists and starts strictly below `d`.
    pub threshold_below_d: Option<bool>,
}

/// One `<name>.csv` per variant plus `figures.json` with shape checks.
pub fn run_figures(cfg: &RunConfig, out: &Path) -> Result<Vec<VariantSummary>, CliError> {
    if cfg.figures.is_empty() {
        return Err(CliError::Config("figures needs at least one variant".into()));
    }
    io::ensure_dir(out)?;
    let mut summaries = Vec::with_capacity(cfg.figures.len());
    for variant in &cfg.figures {
        if variant.name.is_empty() || variant.name.contains(['/', '\\']) {
            return Err(CliError::Config(format!("invalid variant name {:?}", variant.name)));
        }
        let model = ModelConfig {
            theta: variant.theta.unwrap_or(cfg.model.theta),
            ..cfg.model
        };
        let scheme = variant.scheme.unwrap_or(cfg.scheme);
        let grid_cfg = variant.grid.unwrap_or(cfg.grid);
        let grid = build(&model, &scheme, &grid_cfg)?;
        let (solution, converged) = solve_grid(&grid)?;
        let file = format!("{}.csv", variant.name);
        if converged {
            io::write_solution(&out.join(&file), &solution)?;
        }
        let d = model.d;
        let threshold = full_retention_threshold(&solution, d);
        let jump = solution.jump_at_critical();
        eprintln!("{}: {} sweeps, residual {:e}", variant.name, solution.iterations, solution.residual);
        summaries.push(VariantSummary {
            name: variant.name.clone(),
            file,
            theta: model.theta,
            scheme,
            converged,
            iterations: solution.iterations,
            residual: solution.residual,
            bound: solution.bound,
            v_at_truncation: *solution.v.last().expect("grid is never empty"),
            monotone: solution.v.windows(2).all(|w| w[1] >= w[0] - MONOTONE_TOL),
            jump_at_critical: jump,
            jump_is_one: (jump - 1.0).abs() <= 1e-2,
            b_star_at_zero: solution.b_star[0].value(),
            full_retention_from: threshold,
            threshold_below_d: match scheme {
                SchemeConfig::Poisson { .. } => Some(threshold.is_some_and(|z| z < d)),
                SchemeConfig::Deterministic { .. } => None,
            },
        });
    }
    io::write_json(&out.join("figures.json"), &summaries)?;
    let failed: Vec<&str> = summaries.iter().filter(|s| !s.converged).map(|s| s.name.as_str()).collect();
    if !failed.is_empty() {
        return Err(CliError::NonConvergence(failed.join(", ")));
    }
    Ok(summaries)
}
