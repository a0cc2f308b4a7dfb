//! Gamma-family special functions and the one-degree-of-freedom
//! chi-squared kernels used by the noise model and the ROC machinery.
//!
//! Everything here is a pure function of its arguments. The public entry
//! points validate their inputs; the `pub(crate)` helpers skip validation
//! and are used on hot paths where the arguments are known to be valid.

use std::f64::consts::{FRAC_2_SQRT_PI, PI, SQRT_2};

use crate::error::{domain, Result};

/// A value in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Self(value))
        } else {
            Err(domain(format!("probability {value} outside [0, 1]")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

// ln sqrt(2 pi)
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

const SERIES_EPS: f64 = 1e-17;
const CF_EPS: f64 = 1e-16;
const CF_TINY: f64 = 1e-300;
const MAX_TERMS: usize = 100_000;

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(domain(format!("log_gamma requires finite x > 0, got {x}")));
    }
    Ok(ln_gamma_unchecked(x))
}

pub(crate) fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection keeps the Lanczos sum in its accurate range.
        return (PI / (PI * x).sin()).ln() - ln_gamma_unchecked(1.0 - x);
    }
    let z = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + acc.ln()
}

fn check_inc_gamma_args(s: f64, x: f64) -> Result<()> {
    if !s.is_finite() || s <= 0.0 {
        return Err(domain(format!("incomplete gamma requires s > 0, got {s}")));
    }
    if x.is_nan() || x < 0.0 {
        return Err(domain(format!("incomplete gamma requires x >= 0, got {x}")));
    }
    Ok(())
}

/// Regularized lower incomplete gamma `P(s, x) = γ(s, x) / Γ(s)`.
pub fn reg_lower_inc_gamma(s: f64, x: f64) -> Result<f64> {
    check_inc_gamma_args(s, x)?;
    Ok(inc_gamma_pq(s, x, ln_gamma_unchecked(s)).0)
}

/// Regularized upper incomplete gamma `Q(s, x) = 1 - P(s, x)`, computed
/// without subtraction when it is small.
pub fn reg_upper_inc_gamma(s: f64, x: f64) -> Result<f64> {
    check_inc_gamma_args(s, x)?;
    Ok(inc_gamma_pq(s, x, ln_gamma_unchecked(s)).1)
}

/// `ln Q(s, x)`, finite even where `Q` itself underflows.
pub fn ln_reg_upper_inc_gamma(s: f64, x: f64) -> Result<f64> {
    check_inc_gamma_args(s, x)?;
    Ok(ln_q_unchecked(s, x, ln_gamma_unchecked(s)))
}

/// Returns `(P(s, x), Q(s, x))`. `ln_gamma_s` must equal `ln Γ(s)`.
pub(crate) fn inc_gamma_pq(s: f64, x: f64, ln_gamma_s: f64) -> (f64, f64) {
    if x == 0.0 {
        return (0.0, 1.0);
    }
    if x == f64::INFINITY {
        return (1.0, 0.0);
    }
    if x < s + 1.0 {
        let p = lower_series(s, x, ln_gamma_s);
        (p, 1.0 - p)
    } else {
        let q = upper_cf(s, x, ln_gamma_s).exp();
        (1.0 - q, q)
    }
}

pub(crate) fn ln_q_unchecked(s: f64, x: f64, ln_gamma_s: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if x == f64::INFINITY {
        f64::NEG_INFINITY
    } else if x < s + 1.0 {
        (-lower_series(s, x, ln_gamma_s)).ln_1p()
    } else {
        upper_cf(s, x, ln_gamma_s)
    }
}

fn lower_series(s: f64, x: f64, ln_gamma_s: f64) -> f64 {
    let mut ap = s;
    let mut term = 1.0 / s;
    let mut sum = term;
    for _ in 0..MAX_TERMS {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * SERIES_EPS {
            break;
        }
    }
    (sum.ln() - x + s * x.ln() - ln_gamma_s).exp().min(1.0)
}

/// Returns `ln Q(s, x)` from the Legendre continued fraction (modified Lentz).
fn upper_cf(s: f64, x: f64, ln_gamma_s: f64) -> f64 {
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / CF_TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_TERMS {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < CF_TINY {
            d = CF_TINY;
        }
        c = b + an / c;
        if c.abs() < CF_TINY {
            c = CF_TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < CF_EPS {
            break;
        }
    }
    h.ln() - x + s * x.ln() - ln_gamma_s
}

/// Upper tail `Pr(Z > x)` of the standard normal.
pub fn gaussian_tail(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(domain(format!("gaussian_tail requires finite x, got {x}")));
    }
    Ok(normal_sf(x))
}

/// Standard normal survival function. Independent of the incomplete gamma
/// code: an all-positive erf series near the origin and the Laplace
/// continued fraction for erfc in the tail.
pub(crate) fn normal_sf(x: f64) -> f64 {
    if x < 0.0 {
        return 1.0 - normal_sf(-x);
    }
    0.5 * erfc_nonneg(x / SQRT_2)
}

fn erfc_nonneg(y: f64) -> f64 {
    if y < 2.0 {
        // erf(y) = 2/sqrt(pi) e^{-y^2} sum 2^n y^{2n+1} / (2n+1)!!
        let y2 = y * y;
        let mut term = y;
        let mut sum = y;
        let mut n = 0.0;
        loop {
            n += 1.0;
            term *= 2.0 * y2 / (2.0 * n + 1.0);
            sum += term;
            if term <= sum * SERIES_EPS {
                break;
            }
        }
        1.0 - FRAC_2_SQRT_PI * (-y2).exp() * sum
    } else {
        // erfc(y) = e^{-y^2}/sqrt(pi) / (y + (1/2)/(y + 1/(y + (3/2)/(y + ...))))
        let mut f = y;
        let mut c = y;
        let mut d = 0.0;
        for n in 1..MAX_TERMS {
            let a = n as f64 / 2.0;
            d = y + a * d;
            if d.abs() < CF_TINY {
                d = CF_TINY;
            }
            c = y + a / c;
            if c.abs() < CF_TINY {
                c = CF_TINY;
            }
            d = 1.0 / d;
            let delta = c * d;
            f *= delta;
            if (delta - 1.0).abs() < CF_EPS {
                break;
            }
        }
        0.5 * FRAC_2_SQRT_PI * (-y * y).exp() / f
    }
}

/// `Pr(χ'²₁(λ) > threshold)`, the survival function of the noncentral
/// chi-squared law with one degree of freedom.
pub fn noncentral_chisq1_sf(threshold: f64, lambda: f64) -> Result<f64> {
    if threshold.is_nan() || threshold < 0.0 {
        return Err(domain(format!("threshold must be >= 0, got {threshold}")));
    }
    if lambda.is_nan() || lambda < 0.0 {
        return Err(domain(format!("noncentrality must be >= 0, got {lambda}")));
    }
    Ok(ncx2_1_sf(threshold, lambda))
}

pub(crate) fn ncx2_1_sf(threshold: f64, lambda: f64) -> f64 {
    let (rt, rl) = (threshold.sqrt(), lambda.sqrt());
    (normal_sf(rt - rl) + normal_sf(rt + rl)).min(1.0)
}

/// Central chi-squared (1 dof) density.
fn chisq1_pdf(x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    (-0.5 * x - 0.5 * (2.0 * PI * x).ln()).exp()
}

/// The `p`-quantile of the central chi-squared law with one degree of freedom.
pub fn chisq1_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(domain(format!(
            "quantile level must lie in (0, 1), got {p}"
        )));
    }
    let ln_gamma_half = 0.5 * PI.ln();
    // Residual increasing in γ; uses the survival side above the median so
    // small upper tails are not lost to cancellation.
    let residual = |g: f64| {
        let (lower, upper) = inc_gamma_pq(0.5, 0.5 * g, ln_gamma_half);
        if p <= 0.5 {
            lower - p
        } else {
            (1.0 - p) - upper
        }
    };

    let mut lo = 0.0;
    let mut hi = 1.0;
    while residual(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        if hi - lo <= 1e-8 * hi.max(1e-300) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if residual(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    // Newton polish, kept inside the bracket.
    let mut g = 0.5 * (lo + hi);
    for _ in 0..20 {
        let r = residual(g);
        if r == 0.0 {
            break;
        }
        let pdf = chisq1_pdf(g);
        if pdf <= 0.0 || !pdf.is_finite() {
            break;
        }
        let next = g - r / pdf;
        if !(next > lo && next < hi) {
            break;
        }
        if (next - g).abs() <= 1e-15 * g {
            g = next;
            break;
        }
        g = next;
    }
    Ok(g)
}
