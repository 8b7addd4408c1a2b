//! Standard normal CDF and the fused `exp(c) * Phi(x)` products that appear
//! in the drawdown law.

use core::f64::consts::{FRAC_1_SQRT_2, PI};

/// Standard normal distribution function.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal density.
pub fn norm_pdf(x: f64) -> f64 {
    libm::exp(-0.5 * x * x) / libm::sqrt(2.0 * PI)
}

/// Scaled complementary error function `exp(x^2) erfc(x)`.
pub fn erfcx(x: f64) -> f64 {
    if x < 0.0 {
        // erfcx(-x) = 2 exp(x^2) - erfcx(x); overflows only where the true
        // value does.
        return 2.0 * libm::exp(x * x) - erfcx(-x);
    }
    if x < 5.0 {
        return libm::erfc(x) * libm::exp(x * x);
    }
    // Laplace continued fraction
    // erfcx(x) = 1/√π · 1/(x + (1/2)/(x + 1/(x + (3/2)/(x + ...)))),
    // evaluated bottom-up; 60 levels is far past convergence for x >= 5.
    let mut tail = x;
    for n in (1..=60).rev() {
        tail = x + 0.5 * n as f64 / tail;
    }
    1.0 / (tail * libm::sqrt(PI))
}

/// `exp(c) * Phi(x)` without forming either factor when one of them would
/// overflow or underflow on its own.
///
/// For `x < 0` the product is rewritten as
/// `0.5 * erfcx(-x / √2) * exp(c - x^2 / 2)`.
pub fn exp_times_norm_cdf(c: f64, x: f64) -> f64 {
    if x >= -1.0 {
        libm::exp(c) * norm_cdf(x)
    } else {
        0.5 * erfcx(-x * FRAC_1_SQRT_2) * libm::exp(c - 0.5 * x * x)
    }
}
