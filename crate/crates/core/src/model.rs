//! Model parameters, observation schemes and the drift/volatility maps under
//! proportional reinsurance.

use crate::error::{Error, Result};

/// Parameters of the diffusion surplus with proportional reinsurance.
///
/// Under retention `b` the surplus follows
/// `dX = (eta - (1 - b) theta) dt + sigma b dW`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    eta: f64,
    theta: f64,
    sigma: f64,
    r: f64,
    d: f64,
}

impl ModelParams {
    pub fn new(eta: f64, theta: f64, sigma: f64, r: f64, d: f64) -> Result<Self> {
        let finite = [eta, theta, sigma, r, d].iter().all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidParameter("all parameters must be finite"));
        }
        if eta <= 0.0 {
            return Err(Error::InvalidParameter("eta (insurer safety loading) must be positive"));
        }
        if sigma <= 0.0 {
            return Err(Error::InvalidParameter("sigma (volatility) must be positive"));
        }
        if r <= 0.0 {
            return Err(Error::InvalidParameter("r (preference rate) must be positive"));
        }
        if d <= 0.0 {
            return Err(Error::InvalidParameter("d (critical drawdown) must be positive"));
        }
        if theta <= eta {
            return Err(Error::InvalidParameter(
                "theta must exceed eta (reinsurance must be more expensive than first insurance)",
            ));
        }
        Ok(Self {
            eta,
            theta,
            sigma,
            r,
            d,
        })
    }

    /// The reference parameter set eta = 3, sigma = 2, r = 0.3, d = 5 with
    /// the given reinsurer loading.
    pub fn reference(theta: f64) -> Result<Self> {
        Self::new(3.0, theta, 2.0, 0.3, 5.0)
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    /// Drift `eta - (1 - b) theta`.
    pub fn drift(&self, b: Retention) -> f64 {
        self.eta - (1.0 - b.value()) * self.theta
    }

    /// Volatility `sigma b`.
    pub fn vol(&self, b: Retention) -> f64 {
        self.sigma * b.value()
    }

    /// Speed at which the drawdown grows under full cession (`b = 0`).
    pub fn cession_speed(&self) -> f64 {
        self.theta - self.eta
    }
}

/// How the observation (renewal) times are generated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObservationScheme {
    /// Exponential interarrival times with the given rate.
    Poisson { rho: f64 },
    /// Fixed interarrival time.
    Deterministic { period: f64 },
}

impl ObservationScheme {
    pub fn poisson(rho: f64) -> Result<Self> {
        let s = Self::Poisson { rho };
        s.validate()?;
        Ok(s)
    }

    pub fn deterministic(period: f64) -> Result<Self> {
        let s = Self::Deterministic { period };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::Poisson { rho } if !(rho > 0.0 && rho.is_finite()) => {
                Err(Error::InvalidParameter("rho (Poisson rate) must be positive"))
            }
            Self::Deterministic { period } if !(period > 0.0 && period.is_finite()) => {
                Err(Error::InvalidParameter("T (interarrival time) must be positive"))
            }
            _ => Ok(()),
        }
    }

    /// Laplace transform `E[exp(-r T1)]` of the interarrival law.
    pub fn laplace_interarrival(&self, r: f64) -> f64 {
        match *self {
            Self::Poisson { rho } => rho / (rho + r),
            Self::Deterministic { period } => libm::exp(-r * period),
        }
    }

    /// `1 / (1 - E[exp(-r T1)])`, the expected discounted number of
    /// observations and hence an upper bound of the value function.
    pub fn value_upper_bound(&self, r: f64) -> f64 {
        match *self {
            Self::Poisson { rho } => (rho + r) / r,
            Self::Deterministic { period } => -1.0 / libm::expm1(-r * period),
        }
    }
}

/// Retention level in `[0, 1]`: the fraction of risk kept by the insurer.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Retention(f64);

impl Retention {
    pub const ZERO: Self = Self(0.0);
    pub const FULL: Self = Self(1.0);

    pub fn new(b: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&b) {
            Ok(Self(b))
        } else {
            Err(Error::InvalidParameter("retention must lie in [0, 1]"))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0.0
    }
}

impl TryFrom<f64> for Retention {
    type Error = Error;

    fn try_from(b: f64) -> Result<Self> {
        Self::new(b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn b(x: f64) -> Retention {
        Retention::new(x).unwrap()
    }

    #[test]
    fn drift_examples() {
        let p = ModelParams::new(3.0, 4.0, 2.0, 0.3, 5.0).unwrap();
        assert_eq!(p.drift(b(1.0)), 3.0);
        assert_eq!(p.drift(b(0.0)), -1.0);
        let p = ModelParams::new(3.0, 6.0, 2.0, 0.3, 5.0).unwrap();
        assert_eq!(p.drift(b(0.5)), 0.0);
    }

    #[test]
    fn vol_examples() {
        let p = ModelParams::new(3.0, 4.0, 2.0, 0.3, 5.0).unwrap();
        assert_eq!(p.vol(b(1.0)), 2.0);
        assert_eq!(p.vol(b(0.0)), 0.0);
        assert_eq!(p.vol(b(0.25)), 0.5);
    }

    #[test]
    fn laplace_interarrival_examples() {
        let r = 0.3;
        let p = ObservationScheme::poisson(1.0).unwrap();
        assert!((p.laplace_interarrival(r) - 1.0 / 1.3).abs() < 1e-15);
        let d = ObservationScheme::deterministic(1.0).unwrap();
        assert!((d.laplace_interarrival(r) - 0.740_818_220_681_717_9).abs() < 1e-15);
        let fast = ObservationScheme::poisson(1e9).unwrap();
        assert!((fast.laplace_interarrival(r) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn poisson_laplace_matches_numeric_integral() {
        // ∫ rho e^{-(r + rho) t} dt by a crude composite midpoint rule.
        let (rho, r) = (1.0, 0.3);
        let h = 1e-4;
        let total: f64 = (0..400_000)
            .map(|i| {
                let t = (i as f64 + 0.5) * h;
                rho * (-(r + rho) * t).exp() * h
            })
            .sum();
        let s = ObservationScheme::poisson(rho).unwrap();
        assert!((total - s.laplace_interarrival(r)).abs() < 1e-8);
    }

    #[test]
    fn upper_bound_examples() {
        let r = 0.3;
        let p1 = ObservationScheme::poisson(1.0).unwrap();
        assert!((p1.value_upper_bound(r) - 13.0 / 3.0).abs() < 1e-14);
        let d = ObservationScheme::deterministic(1.0).unwrap();
        assert!((d.value_upper_bound(r) - 3.858_295_913_510_082_6).abs() < 1e-13);
        let p10 = ObservationScheme::poisson(10.0).unwrap();
        assert!((p10.value_upper_bound(r) - 10.3 / 0.3).abs() < 1e-12);
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(ModelParams::new(3.0, 3.0, 2.0, 0.3, 5.0).is_err());
        assert!(ModelParams::new(3.0, 2.0, 2.0, 0.3, 5.0).is_err());
        assert!(ModelParams::new(0.0, 4.0, 2.0, 0.3, 5.0).is_err());
        assert!(ModelParams::new(3.0, 4.0, 0.0, 0.3, 5.0).is_err());
        assert!(ModelParams::new(3.0, 4.0, 2.0, 0.0, 5.0).is_err());
        assert!(ModelParams::new(3.0, 4.0, 2.0, 0.3, -1.0).is_err());
        assert!(ModelParams::new(f64::NAN, 4.0, 2.0, 0.3, 5.0).is_err());
        assert!(ObservationScheme::poisson(0.0).is_err());
        assert!(ObservationScheme::deterministic(-1.0).is_err());
        assert!(Retention::new(1.01).is_err());
        assert!(Retention::new(-0.01).is_err());
        assert!(Retention::new(f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn drift_and_vol_ranges(eta in 0.1f64..10.0, extra in 0.01f64..10.0, sigma in 0.1f64..5.0, x in 0.0f64..=1.0) {
            let p = ModelParams::new(eta, eta + extra, sigma, 0.3, 5.0).unwrap();
            let mu = p.drift(b(x));
            prop_assert!(mu >= eta - (eta + extra) - 1e-12 && mu <= eta + 1e-12);
            let s = p.vol(b(x));
            prop_assert!((0.0..=sigma).contains(&s));
        }

        #[test]
        fn bound_times_gap_is_one(rho in 1e-3f64..1e3, period in 1e-3f64..50.0, r in 1e-3f64..5.0) {
            for s in [ObservationScheme::Poisson { rho }, ObservationScheme::Deterministic { period }] {
                let ell = s.laplace_interarrival(r);
                prop_assert!(ell > 0.0 && ell < 1.0);
                let bound = s.value_upper_bound(r);
                prop_assert!(bound >= 1.0);
                prop_assert!((bound * (1.0 - ell) - 1.0).abs() < 1e-9);
            }
        }
    }
}
