//! Closed-form Laplace transforms in time of Gaussian kernels with drift.
//!
//! All three follow from recognising an inverse Gaussian density inside the
//! integrand. With `q = (αμ - |α| √(μ² + 2sσ²)) / σ²`:
//!
//! ```text
//! ∫ e^{-st} (2π t³)^{-1/2} σ^{-1} exp(-(α - μt)² / (2tσ²)) dt = e^q / |α|
//! ∫ e^{-st} (2π t)^{-1/2}  σ^{-1} exp(-(α - μt)² / (2tσ²)) dt = e^q / √(μ² + 2sσ²)
//! ∫ e^{-st} Φ((α - μt) / (σ√t)) dt
//!     = (1{α>0} + ½·1{α=0}) / s - (sgn α + μ / √(μ² + 2sσ²)) e^q / (2s)
//! ```

use crate::error::{Error, Result};

fn check(s: f64, sigma: f64) -> Result<()> {
    if !(s > 0.0) {
        return Err(Error::Domain("Laplace argument s must be positive"));
    }
    if !(sigma > 0.0) {
        return Err(Error::Domain("sigma must be positive"));
    }
    Ok(())
}

fn root(s: f64, mu: f64, sigma: f64) -> f64 {
    libm::sqrt(mu * mu + 2.0 * s * sigma * sigma)
}

/// The common exponent `q`.
pub fn exponent(s: f64, alpha: f64, mu: f64, sigma: f64) -> f64 {
    (alpha * mu - libm::fabs(alpha) * root(s, mu, sigma)) / (sigma * sigma)
}

/// Transform of the first-passage type kernel `(2π t³)^{-1/2} σ^{-1} exp(...)`.
/// Singular at `α = 0`.
pub fn first_passage_kernel(s: f64, alpha: f64, mu: f64, sigma: f64) -> Result<f64> {
    check(s, sigma)?;
    if alpha == 0.0 {
        return Err(Error::Domain("alpha must be non-zero"));
    }
    Ok(libm::exp(exponent(s, alpha, mu, sigma)) / libm::fabs(alpha))
}

/// Transform of the Gaussian kernel `(2π t)^{-1/2} σ^{-1} exp(...)`.
pub fn gaussian_kernel(s: f64, alpha: f64, mu: f64, sigma: f64) -> Result<f64> {
    check(s, sigma)?;
    Ok(libm::exp(exponent(s, alpha, mu, sigma)) / root(s, mu, sigma))
}

/// Transform of `Φ((α - μt) / (σ√t))`.
pub fn gaussian_cdf(s: f64, alpha: f64, mu: f64, sigma: f64) -> Result<f64> {
    check(s, sigma)?;
    let step = if alpha > 0.0 {
        1.0
    } else if alpha == 0.0 {
        0.5
    } else {
        0.0
    };
    let sign = if alpha > 0.0 {
        1.0
    } else if alpha < 0.0 {
        -1.0
    } else {
        0.0
    };
    let q = exponent(s, alpha, mu, sigma);
    Ok(step / s - (sign + mu / root(s, mu, sigma)) * libm::exp(q) / (2.0 * s))
}
