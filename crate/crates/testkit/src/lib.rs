//! Reference quadrature used as an independent oracle by the test suites.
//!
//! Nothing here is used by the solver itself. The routines are deliberately
//! plain: an adaptive Gauss–Kronrod (7/15) scheme with a global error budget,
//! a half-line mapping, and fixed-order Gauss–Legendre rules.

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-15,
            rel: 1e-12,
            max_intervals: 50_000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (f64, f64) {
    let centre = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(centre);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let dx = half * XGK[i];
        let s = f(centre - dx) + f(centre + dx);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * half, ((k - g) * half).abs())
}

/// Adaptive Gauss–Kronrod on a finite interval. The interval is first split
/// into `initial` equal pieces so that narrow peaks are not missed.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: Tolerance) -> Estimate {
    integrate_split(f, lo, hi, 16, tol)
}

pub fn integrate_split<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    initial: usize,
    tol: Tolerance,
) -> Estimate {
    let mut pieces: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(initial * 4);
    let width = (hi - lo) / initial as f64;
    for i in 0..initial {
        let a = lo + width * i as f64;
        let b = if i + 1 == initial { hi } else { a + width };
        let (v, e) = kronrod(&f, a, b);
        pieces.push((a, b, v, e));
    }
    loop {
        let value: f64 = pieces.iter().map(|p| p.2).sum();
        let error: f64 = pieces.iter().map(|p| p.3).sum();
        if error <= tol.abs.max(tol.rel * value.abs()) || pieces.len() >= tol.max_intervals {
            return Estimate {
                value,
                error,
                intervals: pieces.len(),
            };
        }
        let (worst, _) = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .unwrap();
        let (a, b, _, _) = pieces.swap_remove(worst);
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            // Interval cannot be split further in floating point.
            let value: f64 = pieces.iter().map(|p| p.2).sum();
            let error: f64 = pieces.iter().map(|p| p.3).sum();
            return Estimate {
                value,
                error,
                intervals: pieces.len(),
            };
        }
        let (v1, e1) = kronrod(&f, a, mid);
        let (v2, e2) = kronrod(&f, mid, b);
        pieces.push((a, mid, v1, e1));
        pieces.push((mid, b, v2, e2));
    }
}

/// ∫_a^∞ f(x) dx through x = a + u/(1-u).
pub fn integrate_half_line<F: Fn(f64) -> f64>(f: F, a: f64, tol: Tolerance) -> Estimate {
    let g = |u: f64| {
        if u >= 1.0 {
            return 0.0;
        }
        let w = 1.0 - u;
        let x = a + u / w;
        let y = f(x) / (w * w);
        if y.is_finite() {
            y
        } else {
            0.0
        }
    };
    integrate_split(g, 0.0, 1.0, 64, tol)
}

/// ∫_0^∞ f(t) dt after substituting t = w², which removes t^{-1/2}
/// endpoint singularities.
pub fn integrate_half_line_sqrt<F: Fn(f64) -> f64>(f: F, tol: Tolerance) -> Estimate {
    integrate_half_line(|w| 2.0 * w * f(w * w), 0.0, tol)
}

/// Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1);
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (core::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 1 { x } else { p1 };
            let pm1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * p - pm1) / (x * x - 1.0);
            let step = p / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        rule.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    rule
}

/// Composite Gauss–Legendre: `panels` equal panels with an `order`-point rule each.
pub fn gauss_legendre_composite<F: Fn(f64) -> f64>(
    f: F,
    lo: f64,
    hi: f64,
    order: usize,
    panels: usize,
) -> f64 {
    let rule = gauss_legendre(order);
    let width = (hi - lo) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let a = lo + width * p as f64;
        let c = a + 0.5 * width;
        let h = 0.5 * width;
        total += rule.iter().map(|&(x, w)| w * f(c + h * x)).sum::<f64>() * h;
    }
    total
}

/// Standard normal CDF computed by quadrature, independent of the crate under test.
pub fn phi(x: f64) -> f64 {
    0.5 * erfc(-x / core::f64::consts::SQRT_2)
}

fn erfc(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc(-x);
    }
    // erfc(x) = 2/√π e^{-x²} ∫_0^∞ e^{-2xy - y²} dy; the window below
    // covers everything down to e^{-40} of the integrand.
    let span = if x > 0.0 { (x * x + 40.0).sqrt() - x } else { 40f64.sqrt() };
    let tol = Tolerance {
        abs: 0.0,
        rel: 1e-14,
        max_intervals: 10_000,
    };
    let v = integrate(|y| (-2.0 * x * y - y * y).exp(), 0.0, span, tol).value;
    v * (-x * x).exp() * core::f64::consts::FRAC_2_SQRT_PI
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let rule = gauss_legendre(5);
        let s: f64 = rule.iter().map(|&(x, w)| w * x.powi(8)).sum();
        assert!((s - 2.0 / 9.0).abs() < 1e-14);
        let wsum: f64 = rule.iter().map(|&(_, w)| w).sum();
        assert!((wsum - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_half_line() {
        let e = integrate_half_line(|x| (-x).exp(), 0.0, Tolerance::default());
        assert!((e.value - 1.0).abs() < 1e-12, "{e:?}");
        let e = integrate_half_line_sqrt(|t| (-t).exp() / t.sqrt(), Tolerance::default());
        assert!((e.value - core::f64::consts::PI.sqrt()).abs() < 1e-11, "{e:?}");
    }

    #[test]
    fn phi_reference_values() {
        assert!((phi(0.0) - 0.5).abs() < 1e-15);
        assert!((phi(2.0) - 0.977_249_868_051_820_8).abs() < 1e-14);
        assert!((phi(-5.0) / 2.866_515_718_791_939e-7 - 1.0).abs() < 1e-11);
    }
}
