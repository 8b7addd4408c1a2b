//! Time-integrated transition kernel for Poisson observation times.
//!
//! For observation rate `ρ` the kernel is
//! `w(δ, z) = ρ ∫ e^{-(r+ρ)t} f_{Δ_z(t)}(δ) dt`, so that
//! `E[e^{-r T1} v(Δ_z(T1))] = ∫ v(δ) w(δ, z) dδ`. Under a fixed retention it
//! is a sum of exponentials in `δ` with a kink at `δ = z`, which lets cell
//! and tail integrals be taken in closed form.
//!
//! With `s = r + ρ`, `ζ = √(μ² + 2sσ²)`, `p = ζ + μ` and `m = ζ - μ`
//! (so `pm = 2sσ²`) the kernel for `b > 0` reads
//!
//! ```text
//! w/ρ = ζ^{-1} e^{-κ↓ (z - δ)}           δ < z
//!     = ζ^{-1} e^{-κ↑ (δ - z)}           δ > z
//!     + p / (ζ m) · e^{-κ↓ z - κ↑ δ}
//! ```
//!
//! with `κ↑ = p/σ² = 2s/m` and `κ↓ = m/σ² = 2s/p`. Writing the rates as
//! `2s/m`, `2s/p` and the smaller of `p`, `m` as `2sσ²/(larger)` keeps every
//! quantity free of cancellation when `b` is small.

use crate::error::{Error, Result};
use crate::model::{ModelParams, Retention};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PoissonKernel {
    params: ModelParams,
    rho: f64,
}

/// Kernel of one retention level, in the decomposition above.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelShape {
    /// `b = 0`: the drawdown moves deterministically at speed `θ - η`.
    Transport { rate: f64, mass: f64 },
    Diffusive {
        rho: f64,
        zeta: f64,
        p: f64,
        m: f64,
        up: f64,
        down: f64,
        mass_below: f64,
        mass_above: f64,
    },
}

#[inline]
fn one_minus_exp(x: f64) -> f64 {
    -libm::expm1(-x)
}

impl PoissonKernel {
    pub fn new(params: ModelParams, rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::InvalidParameter("rho (Poisson rate) must be positive"));
        }
        Ok(Self { params, rho })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// `ρ / (ρ + r)`, the total mass of the kernel for every `b` and `z`.
    pub fn total_mass(&self) -> f64 {
        self.rho / (self.rho + self.params.r())
    }

    /// `ζ(b) = √(μ(b)² + 2(r+ρ)σ(b)²)`.
    pub fn zeta(&self, b: Retention) -> f64 {
        let mu = self.params.drift(b);
        let sig = self.params.vol(b);
        libm::sqrt(mu * mu + 2.0 * (self.params.r() + self.rho) * sig * sig)
    }

    pub fn shape(&self, b: Retention) -> KernelShape {
        let s = self.params.r() + self.rho;
        if b.is_zero() {
            return KernelShape::Transport {
                rate: s / self.params.cession_speed(),
                mass: self.rho / s,
            };
        }
        let mu = self.params.drift(b);
        let sig = self.params.vol(b);
        let var2s = 2.0 * s * sig * sig;
        let zeta = self.zeta(b);
        let (p, m) = if mu >= 0.0 {
            let p = zeta + mu;
            (p, var2s / p)
        } else {
            let m = zeta - mu;
            (var2s / m, m)
        };
        KernelShape::Diffusive {
            rho: self.rho,
            zeta,
            p,
            m,
            up: 2.0 * s / m,
            down: 2.0 * s / p,
            mass_below: self.rho * p / (2.0 * s * zeta),
            mass_above: self.rho * m / (2.0 * s * zeta),
        }
    }

    /// Kernel for `b = 0`: `ρ/(θ-η) · exp(-(δ-z)(r+ρ)/(θ-η)) · 1{δ > z}`.
    pub fn w0(&self, delta: f64, z: f64) -> f64 {
        self.shape(Retention::ZERO).density(delta, z)
    }

    /// Kernel for `b > 0`.
    pub fn wb(&self, b: Retention, delta: f64, z: f64) -> Result<f64> {
        if b.is_zero() {
            return Err(Error::Domain("use w0 for b = 0"));
        }
        if !(delta > 0.0) {
            return Err(Error::Domain("drawdown level must be positive"));
        }
        Ok(self.shape(b).density(delta, z))
    }

    /// `∫_lo^hi w(δ, z) dδ` in closed form.
    pub fn cell_mass(&self, b: Retention, z: f64, lo: f64, hi: f64) -> Result<f64> {
        if !(lo >= 0.0 && lo <= hi) {
            return Err(Error::Domain("cell must satisfy 0 <= lo <= hi"));
        }
        Ok(self.shape(b).cell(z, lo, hi))
    }

    /// `∫_a^∞ w(δ, z) dδ` for `z <= a`.
    pub fn tail_mass(&self, b: Retention, z: f64, a: f64) -> Result<f64> {
        if z > a {
            return Err(Error::Domain("tail mass requires z <= a"));
        }
        Ok(self.shape(b).tail(z, a))
    }
}

impl KernelShape {
    pub fn density(&self, delta: f64, z: f64) -> f64 {
        match *self {
            Self::Transport { rate, mass } => {
                if delta > z {
                    // ρ/(θ-η) = rate · mass
                    rate * mass * libm::exp(-(delta - z) * rate)
                } else {
                    0.0
                }
            }
            Self::Diffusive {
                rho,
                zeta,
                p,
                m,
                up,
                down,
                ..
            } => {
                let local = if delta < z {
                    libm::exp(-down * (z - delta))
                } else {
                    libm::exp(-up * (delta - z))
                };
                let reflected = p / (zeta * m) * libm::exp(-down * z - up * delta);
                rho * (local / zeta + reflected)
            }
        }
    }

    pub fn cell(&self, z: f64, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        match *self {
            Self::Transport { rate, mass, .. } => {
                if hi <= z {
                    return 0.0;
                }
                let start = lo.max(z);
                mass * libm::exp(-rate * (start - z)) * one_minus_exp(rate * (hi - start))
            }
            Self::Diffusive {
                up,
                down,
                mass_below,
                mass_above,
                ..
            } => {
                let mut local = 0.0;
                if lo < z {
                    let top = hi.min(z);
                    local += mass_below * libm::exp(-down * (z - top)) * one_minus_exp(down * (top - lo));
                }
                if hi > z {
                    let bottom = lo.max(z);
                    local += mass_above * libm::exp(-up * (bottom - z)) * one_minus_exp(up * (hi - bottom));
                }
                // The reflected term carries the same coefficient as the
                // part of the local term below z.
                let reflected = mass_below * libm::exp(-down * z - up * lo) * one_minus_exp(up * (hi - lo));
                local + reflected
            }
        }
    }

    pub fn tail(&self, z: f64, a: f64) -> f64 {
        match *self {
            Self::Transport { rate, mass, .. } => mass * libm::exp(-rate * (a - z).max(0.0)),
            Self::Diffusive {
                up,
                down,
                mass_below,
                mass_above,
                ..
            } => {
                mass_above * libm::exp(-up * (a - z)) + mass_below * libm::exp(-down * z - up * a)
            }
        }
    }
}
