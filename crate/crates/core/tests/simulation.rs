//! Monte Carlo sampler checked against the closed-form drawdown law and
//! against policies whose value is known exactly.

use drawdown_core::sim::{path_rng, sample_drawdown_transition, MaxTracking};
use drawdown_core::stats::ks_statistic;
use drawdown_core::{sim, DrawdownLaw, ModelParams, ObservationScheme, PathConfig, Retention, Sampler};

fn reference_params() -> ModelParams {
    ModelParams::reference(4.0).unwrap()
}

fn ks_against_law(z: f64, b: f64, t: f64, cfg: &PathConfig) -> f64 {
    let p = reference_params();
    let b = Retention::new(b).unwrap();
    let mut samples: Vec<f64> = (0..cfg.n_paths as u64)
        .map(|i| sample_drawdown_transition(&p, z, b, t, cfg, &mut path_rng(cfg.seed, i)))
        .collect();
    let law = DrawdownLaw::new(&p, z, b, t).unwrap();
    ks_statistic(&mut samples, |x| law.cdf(x.max(0.0)).unwrap())
}

#[test]
fn inverse_cdf_sampler_reproduces_the_law() {
    let cfg = PathConfig {
        n_paths: 20_000,
        seed: 7,
        ..PathConfig::default()
    };
    for (z, b, t) in [(0.0, 1.0, 1.0), (1.0, 0.3, 0.5), (5.0, 0.6, 2.0)] {
        let ks = ks_against_law(z, b, t, &cfg);
        // 1.63/√n is the 1% critical value.
        assert!(ks < 1.63 / (cfg.n_paths as f64).sqrt(), "z={z} b={b} t={t}: {ks}");
    }
}

#[test]
fn euler_with_bridge_maximum_reproduces_the_law() {
    let cfg = PathConfig {
        n_paths: 10_000,
        dt: 1e-2,
        seed: 11,
        sampler: Sampler::Euler,
        max_tracking: MaxTracking::Bridge,
        ..PathConfig::default()
    };
    for (z, b, t) in [(0.0, 1.0, 0.5), (1.0, 0.3, 1.0)] {
        let ks = ks_against_law(z, b, t, &cfg);
        assert!(ks < 1.63 / (cfg.n_paths as f64).sqrt(), "z={z} b={b} t={t}: {ks}");
    }
}

#[test]
fn euler_on_grid_points_only_underestimates_the_maximum() {
    let base = PathConfig {
        n_paths: 10_000,
        dt: 1e-1,
        seed: 11,
        sampler: Sampler::Euler,
        max_tracking: MaxTracking::Grid,
        ..PathConfig::default()
    };
    let coarse = ks_against_law(0.0, 1.0, 1.0, &base);
    assert!(coarse > 0.05, "{coarse}");
}

#[test]
fn full_cession_from_above_d_counts_every_observation() {
    let p = reference_params();
    let poisson = ObservationScheme::poisson(1.0).unwrap();
    let cfg = PathConfig {
        n_paths: 20_000,
        seed: 3,
        ..PathConfig::default()
    };
    let est = sim::estimate_value(6.0, |_| Retention::ZERO, poisson, &p, &cfg).unwrap();
    let bound = poisson.value_upper_bound(p.r());
    assert!((est.mean - bound).abs() < 3.0 * est.std_err + cfg.horizon_cutoff * bound, "{est:?}");

    let periodic = ObservationScheme::deterministic(1.0).unwrap();
    let est = sim::estimate_value(6.0, |_| Retention::ZERO, periodic, &p, &cfg).unwrap();
    let bound = periodic.value_upper_bound(p.r());
    assert!((est.mean - bound).abs() <= cfg.horizon_cutoff * bound, "{est:?}");
}

#[test]
fn full_retention_from_zero_rarely_breaches() {
    let p = reference_params();
    let scheme = ObservationScheme::poisson(1.0).unwrap();
    let cfg = PathConfig {
        n_paths: 5_000,
        seed: 5,
        ..PathConfig::default()
    };
    let est = sim::estimate_value(0.0, |_| Retention::FULL, scheme, &p, &cfg).unwrap();
    assert!(est.mean >= 0.0 && est.mean < 0.05, "{est:?}");
    assert!(est.n_terms_avg > 10.0);
}
