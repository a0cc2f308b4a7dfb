//! Goodness-of-fit helpers for the Monte Carlo checks.

use crate::specfun::{inc_gamma_pq, ln_gamma_unchecked};

/// Two-sided Kolmogorov–Smirnov distance between `samples` and `cdf`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    d
}

/// Critical KS distance at significance `level` for `n` samples, from the
/// asymptotic Kolmogorov law with Stephens' small-sample correction.
pub fn ks_critical_value(n: usize, level: f64) -> f64 {
    let c = (-0.5 * (0.5 * level).ln()).sqrt();
    let rn = (n as f64).sqrt();
    c / (rn + 0.12 + 0.11 / rn)
}

/// CDF of the central chi-squared law with one degree of freedom.
pub fn chisq1_cdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    inc_gamma_pq(0.5, 0.5 * x, ln_gamma_unchecked(0.5)).0
}
