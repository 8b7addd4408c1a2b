//! Law of the drawdown after time `t` under a constant retention.
//!
//! Starting from drawdown `z` with drift `mu` and volatility `s`, the
//! drawdown at time `t` has distribution function
//!
//! ```text
//! F(δ) = Φ((δ - z + tμ) / (s√t)) - exp(-2δμ/s²) Φ((-δ - z + tμ) / (s√t))
//! ```
//!
//! for `b > 0`. With `b = 0` the surplus is deterministic and the drawdown
//! is the point `z + (θ - η) t`.

use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::model::{ModelParams, Retention};
use crate::normal::{exp_times_norm_cdf, norm_cdf};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DrawdownLaw {
    z: f64,
    b: Retention,
    t: f64,
    mu: f64,
    sig: f64,
}

impl DrawdownLaw {
    pub fn new(params: &ModelParams, z: f64, b: Retention, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain("horizon t must be positive"));
        }
        if !(z >= 0.0 && z.is_finite()) {
            return Err(Error::Domain("initial drawdown z must be non-negative"));
        }
        Ok(Self {
            z,
            b,
            t,
            mu: params.drift(b),
            sig: params.vol(b),
        })
    }

    pub fn initial(&self) -> f64 {
        self.z
    }

    pub fn retention(&self) -> Retention {
        self.b
    }

    pub fn horizon(&self) -> f64 {
        self.t
    }

    /// Location of the point mass when `b = 0`.
    pub fn atom(&self) -> Option<f64> {
        self.b.is_zero().then_some(self.z - self.mu * self.t)
    }

    /// `P[Δ(t) <= delta]`.
    pub fn cdf(&self, delta: f64) -> Result<f64> {
        if !(delta >= 0.0) {
            return Err(Error::Domain("drawdown level must be non-negative"));
        }
        Ok(self.cdf_unchecked(delta))
    }

    pub(crate) fn cdf_unchecked(&self, delta: f64) -> f64 {
        if let Some(atom) = self.atom() {
            // Right-continuous: the atom itself counts.
            return if atom <= delta { 1.0 } else { 0.0 };
        }
        if delta.is_infinite() {
            return 1.0;
        }
        let scale = self.sig * libm::sqrt(self.t);
        let drift = self.t * self.mu;
        let upper = (delta - self.z + drift) / scale;
        let reflected = (-delta - self.z + drift) / scale;
        let c = -2.0 * delta * self.mu / (self.sig * self.sig);
        let f = norm_cdf(upper) - exp_times_norm_cdf(c, reflected);
        f.clamp(0.0, 1.0)
    }

    /// Density of the drawdown on `(0, ∞)`. Only defined for `b > 0`.
    pub fn pdf(&self, delta: f64) -> Result<f64> {
        if self.b.is_zero() {
            return Err(Error::Domain("no density exists for b = 0"));
        }
        if !(delta >= 0.0) {
            return Err(Error::Domain("drawdown level must be non-negative"));
        }
        if delta == 0.0 {
            return Ok(0.0);
        }
        Ok(self.pdf_unchecked(delta))
    }

    pub(crate) fn pdf_unchecked(&self, delta: f64) -> f64 {
        let var = self.sig * self.sig;
        let scale = self.sig * libm::sqrt(self.t);
        let drift = self.t * self.mu;
        let upper = (delta - self.z + drift) / scale;
        let reflected = (-delta - self.z + drift) / scale;
        let c = -2.0 * delta * self.mu / var;
        let bell = 1.0 / (libm::sqrt(2.0 * PI * self.t) * self.sig);
        // exp(c - reflected²/2) equals the reflected Gaussian bell
        // exp(-((δ + z + tμ)² - 4tμz) / (2ts²)) and never exceeds one.
        let g = bell * (libm::exp(c - 0.5 * reflected * reflected) + libm::exp(-0.5 * upper * upper));
        let h = 2.0 * self.mu / var * exp_times_norm_cdf(c, reflected);
        (g + h).max(0.0)
    }

    /// Inverse distribution function, accurate to `tol` in the drawdown
    /// level. Safeguarded Newton iteration inside a bisection bracket.
    pub fn quantile(&self, u: f64, tol: f64) -> Result<f64> {
        if !(0.0..1.0).contains(&u) {
            return Err(Error::Domain("quantile level must lie in [0, 1)"));
        }
        if let Some(atom) = self.atom() {
            return Ok(atom);
        }
        let mut lo = 0.0;
        if self.cdf_unchecked(lo) >= u {
            return Ok(lo);
        }
        let spread = self.sig * libm::sqrt(self.t);
        let mut hi = self.z + self.t * libm::fabs(self.mu) + 8.0 * spread;
        while self.cdf_unchecked(hi) < u {
            lo = hi;
            hi *= 2.0;
        }
        let mut x = 0.5 * (lo + hi);
        for _ in 0..200 {
            let f = self.cdf_unchecked(x) - u;
            if f < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let slope = self.pdf_unchecked(x);
            let newton = x - f / slope;
            if slope > 0.0 && newton > lo && newton < hi {
                // Quadratic convergence: a step this small leaves an error
                // far below tol.
                if libm::fabs(newton - x) <= 0.5 * tol {
                    return Ok(newton);
                }
                x = newton;
            } else {
                x = 0.5 * (lo + hi);
            }
            if hi - lo <= tol {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn reference_params() -> ModelParams {
        ModelParams::reference(4.0).unwrap()
    }

    fn law(z: f64, b: f64, t: f64) -> DrawdownLaw {
        DrawdownLaw::new(&reference_params(), z, Retention::new(b).unwrap(), t).unwrap()
    }

    #[test]
    fn cdf_vanishes_at_zero_from_zero() {
        for b in [0.1, 0.5, 1.0] {
            for t in [0.1, 1.0, 3.0] {
                assert!(law(0.0, b, t).cdf(0.0).unwrap().abs() < 1e-15);
            }
        }
    }

    #[test]
    fn cdf_reference_point() {
        // Φ(2) - e^{-3} Φ(0).
        let want = 0.952_356_333_867_888_8;
        assert!((law(1.0, 1.0, 1.0).cdf(2.0).unwrap() - want).abs() < 1e-14);
    }

    #[test]
    fn point_mass_branch_is_right_continuous() {
        let l = law(1.0, 0.0, 1.0);
        assert_eq!(l.atom(), Some(2.0));
        assert_eq!(l.cdf(2.0).unwrap(), 1.0);
        assert_eq!(l.cdf(1.999_999).unwrap(), 0.0);
        assert!(l.pdf(2.5).is_err());
    }

    #[test]
    fn domain_errors() {
        let p = reference_params();
        assert!(DrawdownLaw::new(&p, 1.0, Retention::FULL, 0.0).is_err());
        assert!(DrawdownLaw::new(&p, 1.0, Retention::FULL, -1.0).is_err());
        assert!(DrawdownLaw::new(&p, -1.0, Retention::FULL, 1.0).is_err());
        assert!(law(1.0, 1.0, 1.0).cdf(-0.1).is_err());
        assert!(law(1.0, 1.0, 1.0).pdf(-0.1).is_err());
    }

    #[test]
    fn pdf_is_derivative_of_cdf() {
        let l = law(1.0, 1.0, 1.0);
        let h = 1e-5;
        let fd = (l.cdf(1.5 + h).unwrap() - l.cdf(1.5 - h).unwrap()) / (2.0 * h);
        assert!((fd - l.pdf(1.5).unwrap()).abs() < 1e-6);
    }

    #[test]
    fn small_retention_stays_finite() {
        // μ/σ² ~ 1/b² grows without bound as b → 0.
        for b in [1e-2, 1e-3, 1e-5] {
            let l = law(2.0, b, 1.0);
            // Centre of the law; the spread is 2b.
            let atom = 2.0 - l.mu;
            let below = l.cdf(atom - 0.05).unwrap();
            let above = l.cdf(atom + 0.05).unwrap();
            assert!(below.is_finite() && above.is_finite());
            assert!(below < 0.05 && above > 0.95, "b={b}: {below} {above}");
            assert!(l.pdf(atom).unwrap().is_finite());
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        let l = law(1.0, 0.7, 0.8);
        for u in [1e-6, 0.01, 0.3, 0.5, 0.9, 0.999_999] {
            let x = l.quantile(u, 1e-10).unwrap();
            assert!(l.cdf((x - 1e-10).max(0.0)).unwrap() <= u + 1e-12);
            assert!(l.cdf(x + 1e-10).unwrap() >= u - 1e-12);
        }
        assert_eq!(law(1.0, 0.0, 1.0).quantile(0.3, 1e-10).unwrap(), 2.0);
    }

    proptest! {
        #[test]
        fn cdf_monotone_in_level_and_initial(
            b in 0.05f64..=1.0, t in 0.05f64..3.0, z in 0.0f64..8.0,
            x in 0.0f64..12.0, dx in 0.0f64..2.0, dz in 0.0f64..2.0,
        ) {
            let l = law(z, b, t);
            let f = l.cdf(x).unwrap();
            prop_assert!((0.0..=1.0).contains(&f));
            prop_assert!(l.cdf(x + dx).unwrap() >= f - 1e-12);
            // Larger initial drawdown is stochastically larger.
            prop_assert!(law(z + dz, b, t).cdf(x).unwrap() <= f + 1e-12);
        }

        #[test]
        fn pdf_non_negative(b in 0.01f64..=1.0, t in 0.05f64..3.0, z in 0.0f64..8.0, x in 1e-6f64..15.0) {
            let v = law(z, b, t).pdf(x).unwrap();
            prop_assert!(v >= 0.0 && v.is_finite());
        }
    }
}
