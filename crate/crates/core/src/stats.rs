//! Summation and goodness-of-fit helpers for the Monte Carlo checks.

/// Pairwise (cascade) summation; the result depends only on the order of
/// `xs`, not on how the values were produced.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let (left, right) = xs.split_at(xs.len() / 2);
    pairwise_sum(left) + pairwise_sum(right)
}

/// Kolmogorov–Smirnov distance between the empirical law of `samples` and
/// the distribution function `cdf`. Sorts `samples` in place.
pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &mut [f64], cdf: F) -> f64 {
    samples.sort_unstable_by(f64::total_cmp);
    let n = samples.len() as f64;
    let mut worst: f64 = 0.0;
    let mut i = 0;
    while i < samples.len() {
        // Treat ties as one jump of the empirical CDF.
        let x = samples[i];
        let mut j = i;
        while j < samples.len() && samples[j] == x {
            j += 1;
        }
        let f = cdf(x);
        worst = worst.max(libm::fabs(f - j as f64 / n));
        let below = if x > 0.0 || i > 0 { cdf(prev_level(x)) } else { 0.0 };
        worst = worst.max(libm::fabs(below - i as f64 / n));
        i = j;
    }
    worst
}

fn prev_level(x: f64) -> f64 {
    // Largest double below x; the CDF just left of an atom.
    if x > 0.0 {
        f64::from_bits(x.to_bits() - 1)
    } else if x == 0.0 {
        -f64::MIN_POSITIVE
    } else {
        f64::from_bits(x.to_bits() + 1)
    }
}

/// Two-sample Kolmogorov–Smirnov distance. Sorts both slices in place.
pub fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_unstable_by(f64::total_cmp);
    b.sort_unstable_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut worst: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        worst = worst.max(libm::fabs(i as f64 / na - j as f64 / nb));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn pairwise_sum_matches_naive_on_exact_values() {
        let xs: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&xs), 499_500.0);
    }

    #[test]
    fn ks_of_uniform_grid() {
        let n = 1000;
        let mut xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&mut xs, |x| x.clamp(0.0, 1.0));
        assert!((d - 0.5 / n as f64).abs() < 1e-12);
    }

    #[test]
    fn ks_sees_atoms() {
        let mut xs = [0.0; 10];
        // Continuous uniform law against a sample concentrated at 0.
        let d = ks_statistic(&mut xs, |x| x.clamp(0.0, 1.0));
        assert_eq!(d, 1.0);
    }

    #[test]
    fn two_sample_identical_and_disjoint() {
        let mut a = [1.0, 2.0, 3.0];
        let mut b = [3.0, 1.0, 2.0];
        assert_eq!(ks_two_sample(&mut a, &mut b), 0.0);
        let mut c = [10.0, 11.0];
        assert_eq!(ks_two_sample(&mut a, &mut c), 1.0);
    }
}
