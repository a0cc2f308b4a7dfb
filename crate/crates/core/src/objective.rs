//! The noncentrality objective
//!
//! ```text
//! G(x) = f(x)² / (1/4 − [(1 − q0 − q1) F(x) − 1/2 + q0]²)
//! ```
//!
//! and the factorization of its derivative used to reason about its shape.
//! The denominator equals `p(1 − p)` with `p = q0 + (1 − q0 − q1) F(x)`,
//! the probability that a received bit is one. Both `p` and `1 − p` are
//! written as nonnegative combinations of `F(x)` and `1 − F(x)`:
//!
//! ```text
//! p     = q0 (1 − F) + (1 − q1) F
//! 1 − p = q1 F + (1 − q0)(1 − F)
//! ```
//!
//! which keeps them accurate, and lets them be taken to log space, far in
//! either tail.

use crate::error::{domain, Error, Result};
use crate::ggn::GgnParams;

/// Past this many scale units the objective is evaluated in log space.
const LOG_SPACE_RADIUS: f64 = 5.0;

/// Values this close to zero carry no sign.
pub const SIGN_TOLERANCE: f64 = 1e-12;

/// Flipping probabilities of the binary channel between sensors and the
/// fusion center: `q0 = Pr(u = 1 | b = 0)`, `q1 = Pr(u = 0 | b = 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub q0: f64,
    pub q1: f64,
}

impl ChannelParams {
    /// Validates both probabilities and rejects the uninformative channel
    /// `q0 + q1 = 1`.
    pub fn new(q0: f64, q1: f64) -> Result<Self> {
        let ch = Self::new_lenient(q0, q1)?;
        if !ch.is_informative() {
            return Err(Error::UninformativeChannel { q0, q1 });
        }
        Ok(ch)
    }

    /// Validates the probabilities but allows `q0 + q1 = 1`; the likelihood
    /// of such a channel is still well defined.
    pub fn new_lenient(q0: f64, q1: f64) -> Result<Self> {
        for (name, q) in [("q0", q0), ("q1", q1)] {
            if !(0.0..=1.0).contains(&q) {
                return Err(domain(format!("{name} must lie in [0, 1], got {q}")));
            }
        }
        Ok(Self { q0, q1 })
    }

    /// An error-free channel.
    pub fn ideal() -> Self {
        Self { q0: 0.0, q1: 0.0 }
    }

    /// `1 − q0 − q1`.
    pub fn gain(&self) -> f64 {
        1.0 - self.q0 - self.q1
    }

    pub fn is_informative(&self) -> bool {
        self.gain() != 0.0
    }

    pub fn is_symmetric(&self) -> bool {
        self.q0 == self.q1
    }

    pub(crate) fn require_informative(&self) -> Result<()> {
        if self.is_informative() {
            Ok(())
        } else {
            Err(Error::UninformativeChannel {
                q0: self.q0,
                q1: self.q1,
            })
        }
    }

    /// Probability that the received bit is one when the sensor bit is one
    /// with probability `F` (and zero with probability `Fc = 1 − F`).
    #[inline]
    pub fn received_one(&self, f: f64, fc: f64) -> f64 {
        self.q0 * fc + (1.0 - self.q1) * f
    }

    /// Complement of [`Self::received_one`].
    #[inline]
    pub fn received_zero(&self, f: f64, fc: f64) -> f64 {
        self.q1 * f + (1.0 - self.q0) * fc
    }
}

/// The representative of a channel's symmetry class with `q0c ≥ q1c` and
/// `1 − q0c − q1c > 0`.
///
/// `G(x; q0, q1) = G(s·x; q0c, q1c)` where `s = −1` if `negate` is set and
/// `+1` otherwise; the maximizer of the original objective is therefore
/// the canonical maximizer multiplied by `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanonicalChannel {
    pub q0c: f64,
    pub q1c: f64,
    pub negate: bool,
}

impl CanonicalChannel {
    pub fn channel(&self) -> ChannelParams {
        ChannelParams {
            q0: self.q0c,
            q1: self.q1c,
        }
    }

    pub fn gain(&self) -> f64 {
        1.0 - self.q0c - self.q1c
    }

    pub fn is_symmetric(&self) -> bool {
        self.q0c == self.q1c
    }

    /// Maps a point of the canonical problem back to the original one.
    pub fn to_original(&self, x: f64) -> f64 {
        if self.negate {
            -x
        } else {
            x
        }
    }

    /// `lim_{x→0+} M(x)` for `β > 1`.
    pub fn m_limit_at_zero(&self) -> f64 {
        (self.q0c - self.q1c) / (2.0 * self.gain())
    }

    /// `lim_{x→∞} M(x)`.
    pub fn m_limit_at_infinity(&self) -> f64 {
        -self.q1c / self.gain()
    }
}

/// Reduces any informative channel to its canonical representative using
///
/// ```text
/// G(x, q0, q1) = G(−x, q1, q0) = G(x, 1 − q0, 1 − q1) = G(−x, 1 − q1, 1 − q0)
/// ```
pub fn canonicalize(channel: ChannelParams) -> Result<CanonicalChannel> {
    channel.require_informative()?;
    let (q0, q1) = (channel.q0, channel.q1);
    let (a, b) = if channel.gain() > 0.0 {
        (q0, q1)
    } else {
        (1.0 - q0, 1.0 - q1)
    };
    Ok(if a >= b {
        CanonicalChannel {
            q0c: a,
            q1c: b,
            negate: false,
        }
    } else {
        CanonicalChannel {
            q0c: b,
            q1c: a,
            negate: true,
        }
    })
}

#[inline]
fn ln_add_exp(a: f64, b: f64) -> f64 {
    let hi = a.max(b);
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + ((a - hi).exp() + (b - hi).exp()).ln()
}

#[inline]
fn ln_or_neg_inf(v: f64) -> f64 {
    if v > 0.0 {
        v.ln()
    } else {
        f64::NEG_INFINITY
    }
}

/// `(ln f, ln p, ln(1 − p))` at `x`.
fn log_parts(x: f64, ch: &ChannelParams, noise: &GgnParams) -> (f64, f64, f64) {
    let ln_f = noise.ln_pdf(x);
    if x.abs() * noise.alpha() > LOG_SPACE_RADIUS {
        let (ln_cdf, ln_sf) = (noise.ln_cdf(x), noise.ln_sf(x));
        let ln_p = ln_add_exp(
            ln_or_neg_inf(ch.q0) + ln_sf,
            ln_or_neg_inf(1.0 - ch.q1) + ln_cdf,
        );
        let ln_pc = ln_add_exp(
            ln_or_neg_inf(ch.q1) + ln_cdf,
            ln_or_neg_inf(1.0 - ch.q0) + ln_sf,
        );
        (ln_f, ln_p, ln_pc)
    } else {
        let (f, fc) = noise.cdf_pair(x);
        (
            ln_f,
            ch.received_one(f, fc).ln(),
            ch.received_zero(f, fc).ln(),
        )
    }
}

/// `G(x)` for the given channel and noise.
pub fn eval_g(x: f64, channel: &ChannelParams, noise: &GgnParams) -> Result<f64> {
    channel.require_informative()?;
    if !x.is_finite() {
        return Err(domain(format!("G requires finite x, got {x}")));
    }
    Ok(g_unchecked(x, channel, noise))
}

#[inline]
pub(crate) fn g_unchecked(x: f64, channel: &ChannelParams, noise: &GgnParams) -> f64 {
    if x.abs() * noise.alpha() > LOG_SPACE_RADIUS {
        let (ln_f, ln_p, ln_pc) = log_parts(x, channel, noise);
        (2.0 * ln_f - ln_p - ln_pc).exp()
    } else {
        let f = noise.pdf(x);
        let (cdf, sf) = noise.cdf_pair(x);
        f * f / (channel.received_one(cdf, sf) * channel.received_zero(cdf, sf))
    }
}

/// `G'(x)` by direct differentiation of the quotient:
///
/// ```text
/// G'(x) = G(x) · [2 f'(x)/f(x) − (1 − q0 − q1) f(x) (1 − 2p) / (p (1 − p))]
/// ```
///
/// Valid at every `x`; at `x = 0` the right-hand derivative is returned,
/// which is `−∞` when `β < 1`.
pub fn eval_g_prime(x: f64, channel: &ChannelParams, noise: &GgnParams) -> Result<f64> {
    channel.require_informative()?;
    if !x.is_finite() {
        return Err(domain(format!("G' requires finite x, got {x}")));
    }
    Ok(g_prime_unchecked(x, channel, noise))
}

pub(crate) fn g_prime_unchecked(x: f64, channel: &ChannelParams, noise: &GgnParams) -> f64 {
    let log_score = if x == 0.0 {
        noise.pdf_prime(0.0) / noise.pdf(0.0)
    } else {
        -x.signum() * noise.score_factor(x)
    };
    let (ln_f, ln_p, ln_pc) = log_parts(x, channel, noise);
    let g = (2.0 * ln_f - ln_p - ln_pc).exp();
    // f / (p(1−p)) and (1 − 2p) = (1−p) − p
    let ratio = (ln_f - ln_p - ln_pc).exp();
    let one_minus_2p = ln_pc.exp() - ln_p.exp();
    g * (2.0 * log_score) - g * channel.gain() * ratio * one_minus_2p
}

/// The quantities entering the factored derivative of `G` for `x > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MFamily {
    pub m1: f64,
    pub m2: f64,
    pub m3: f64,
    /// `M(x) = F(x) + (2q0 − 1)/(2(1 − q0 − q1)) + m1(x) − m2(x)`
    pub m: f64,
    pub m_prime: f64,
    pub m_second: f64,
}

/// Evaluates `m1, m2, m3, M, M', M''` at `x > 0` for a canonical channel.
///
/// ```text
/// m1(x) = f(x) / (2 α^β β x^{β−1})
/// m2(x) = sqrt(1/(4(1 − q0 − q1)²) + m1(x)²)
/// m3(x) = (1 − β)/(2 α^β β) x^{−β} − 1/2
/// M'(x) = f(x) [1 + (1 − m1/m2) m3]
/// M''(x) = f'(x) M'(x)/f(x)
///        + f(x)(1 − m1/m2) [−(β/x)(m3 + 1/2) − f(x) m3² (1 + m1/m2)/m2]
/// ```
pub fn eval_m_family(x: f64, channel: &CanonicalChannel, noise: &GgnParams) -> Result<MFamily> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(domain(format!(
            "M is defined for finite x > 0 only, got {x}"
        )));
    }
    Ok(m_family_unchecked(x, channel, noise))
}

pub(crate) fn m_family_unchecked(x: f64, channel: &CanonicalChannel, noise: &GgnParams) -> MFamily {
    let (alpha, beta) = (noise.alpha(), noise.beta());
    let a = channel.gain();
    let quarter_inv_a2 = 1.0 / (4.0 * a * a);
    let ab = alpha.powf(beta) * beta;

    let f = noise.pdf(x);
    let cdf = noise.cdf(x);
    let m1 = f / (2.0 * ab * x.powf(beta - 1.0));
    let m2 = (quarter_inv_a2 + m1 * m1).sqrt();
    let m3 = (1.0 - beta) / (2.0 * ab) * x.powf(-beta) - 0.5;

    let c = (2.0 * channel.q0c - 1.0) / (2.0 * a);
    // m1 − m2 without cancellation
    let m = cdf + c - quarter_inv_a2 / (m1 + m2);
    let one_minus_r = quarter_inv_a2 / (m2 * (m1 + m2));
    let r = m1 / m2;
    let m_prime = f * (1.0 + one_minus_r * m3);
    let log_slope = -ab * x.powf(beta - 1.0);
    let m_second = log_slope * m_prime
        + f * one_minus_r * (-(beta / x) * (m3 + 0.5) - f * m3 * m3 * (1.0 + r) / m2);

    MFamily {
        m1,
        m2,
        m3,
        m,
        m_prime,
        m_second,
    }
}

/// `G'(x)` from the factored form
///
/// ```text
/// G'(x) = f³ [F + c + m1 + m2] M / (a² m1 [1/(4a²) − (F + c)²]²),
/// c = (2q0 − 1)/(2a),  a = 1 − q0 − q1
/// ```
///
/// for `x > 0` and a canonical channel. Every factor except `M` is
/// positive there.
pub fn eval_g_prime_factored(x: f64, channel: &CanonicalChannel, noise: &GgnParams) -> Result<f64> {
    let fam = eval_m_family(x, channel, noise)?;
    let a = channel.gain();
    let c = (2.0 * channel.q0c - 1.0) / (2.0 * a);
    let f = noise.pdf(x);
    let (cdf, sf) = noise.cdf_pair(x);
    let y = cdf + c;
    // 1/(4a²) − (F + c)² = p(1 − p)/a², evaluated without cancellation
    let chan = channel.channel();
    let bracket = chan.received_one(cdf, sf) * chan.received_zero(cdf, sf) / (a * a);
    Ok(f * f * f * (y + fam.m1 + fam.m2) * fam.m / (a * a * fam.m1 * bracket * bracket))
}

/// Reference points for the shape analysis of `M`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxPoints {
    /// `(1/α)((β − 1)/β)^{1/β}`, where `m3 = −1`. Upper bound on the maximizer.
    pub x1: f64,
    /// `(1/α)((β − 2)/(2β))^{1/β}`, defined for `β > 2`.
    pub x2: Option<f64>,
}

pub fn aux_points(noise: &GgnParams) -> Result<AuxPoints> {
    let (alpha, beta) = (noise.alpha(), noise.beta());
    if beta <= 1.0 {
        return Err(domain(format!("x1 requires beta > 1, got {beta}")));
    }
    let x1 = ((beta - 1.0) / beta).powf(1.0 / beta) / alpha;
    let x2 = (beta > 2.0).then(|| ((beta - 2.0) / (2.0 * beta)).powf(1.0 / beta) / alpha);
    Ok(AuxPoints { x1, x2 })
}

/// `-1`, `0` or `1`, treating magnitudes below [`SIGN_TOLERANCE`] as zero.
pub fn sign_with_tolerance(v: f64) -> i8 {
    if v > SIGN_TOLERANCE {
        1
    } else if v < -SIGN_TOLERANCE {
        -1
    } else {
        0
    }
}

/// Largest relative deviation among the four equivalent forms
/// `G(x, q0, q1)`, `G(−x, q1, q0)`, `G(x, 1 − q0, 1 − q1)`, `G(−x, 1 − q1, 1 − q0)`.
pub fn symmetry_residual(x: f64, channel: &ChannelParams, noise: &GgnParams) -> Result<f64> {
    let (q0, q1) = (channel.q0, channel.q1);
    let reference = eval_g(x, channel, noise)?;
    let forms = [
        (-x, ChannelParams { q0: q1, q1: q0 }),
        (
            x,
            ChannelParams {
                q0: 1.0 - q0,
                q1: 1.0 - q1,
            },
        ),
        (
            -x,
            ChannelParams {
                q0: 1.0 - q1,
                q1: 1.0 - q0,
            },
        ),
    ];
    let mut worst: f64 = 0.0;
    for (xv, ch) in forms {
        let g = eval_g(xv, &ch, noise)?;
        worst = worst.max((g - reference).abs() / reference.abs().max(f64::MIN_POSITIVE));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ggn(alpha: f64, beta: f64) -> GgnParams {
        GgnParams::new(alpha, beta).unwrap()
    }

    fn ch(q0: f64, q1: f64) -> ChannelParams {
        ChannelParams::new(q0, q1).unwrap()
    }

    #[test]
    fn channel_validation() {
        assert!(matches!(
            ChannelParams::new(0.5, 0.5),
            Err(Error::UninformativeChannel { .. })
        ));
        assert!(ChannelParams::new(1.2, 0.0).is_err());
        assert!(ChannelParams::new(0.1, -0.1).is_err());
        assert!(ChannelParams::new_lenient(0.3, 0.7).is_ok());
    }

    #[test]
    fn canonical_examples() {
        assert_eq!(
            canonicalize(ch(0.7, 0.0)).unwrap(),
            CanonicalChannel {
                q0c: 0.7,
                q1c: 0.0,
                negate: false
            }
        );
        assert_eq!(
            canonicalize(ch(0.0, 0.7)).unwrap(),
            CanonicalChannel {
                q0c: 0.7,
                q1c: 0.0,
                negate: true
            }
        );
        let c = canonicalize(ch(0.9, 0.4)).unwrap();
        assert!((c.q0c - 0.6).abs() < 1e-15 && (c.q1c - 0.1).abs() < 1e-15);
        // G(x; 0.9, 0.4) = G(−x; 0.6, 0.1)
        assert!(c.negate);
        let noise = ggn(1.0, 2.5);
        for i in -20..=20 {
            let x = i as f64 * 0.1;
            let lhs = eval_g(x, &ch(0.9, 0.4), &noise).unwrap();
            let rhs = eval_g(c.to_original(x), &c.channel(), &noise).unwrap();
            assert!((lhs - rhs).abs() < 1e-12 * lhs, "x = {x}");
        }
        assert!(canonicalize(ChannelParams { q0: 0.25, q1: 0.75 }).is_err());
    }

    #[test]
    fn canonical_form_preserves_g_everywhere() {
        let noise = ggn(1.3, 1.7);
        for (q0, q1) in [(0.1, 0.6), (0.8, 0.9), (0.95, 0.2), (0.3, 0.3), (0.7, 0.7)] {
            let orig = ch(q0, q1);
            let c = canonicalize(orig).unwrap();
            assert!(c.q0c >= c.q1c && c.gain() > 0.0);
            for i in -30..=30 {
                let x = i as f64 * 0.07;
                let lhs = eval_g(x, &orig, &noise).unwrap();
                let rhs = eval_g(c.to_original(x), &c.channel(), &noise).unwrap();
                assert!((lhs - rhs).abs() < 1e-12 * lhs);
            }
        }
    }

    #[test]
    fn g_values() {
        let g0 = eval_g(0.0, &ch(0.0, 0.0), &ggn(1.0, 2.0)).unwrap();
        assert!((g0 - 4.0 / PI).abs() < 1e-14);
        // bracket = 0.3 * 0.5 - 0.5 + 0.7 = 0.35, denominator 0.25 - 0.35^2 = 0.1275
        let g = eval_g(0.0, &ch(0.7, 0.0), &ggn(1.0, 2.0)).unwrap();
        assert!((g - (1.0 / PI) / 0.1275).abs() < 1e-13);
        let noise = ggn(1.0, 2.0);
        assert!(
            eval_g(0.4, &ch(0.7, 0.0), &noise).unwrap()
                > eval_g(-0.4, &ch(0.7, 0.0), &noise).unwrap()
        );
        assert!(eval_g(0.0, &ChannelParams { q0: 0.5, q1: 0.5 }, &noise).is_err());
        assert!(eval_g(f64::NAN, &ch(0.1, 0.0), &noise).is_err());
    }

    #[test]
    fn g_positive_in_far_tails() {
        for beta in [0.5, 1.0, 2.0, 8.0] {
            let noise = ggn(1.0, beta);
            for q in [(0.7, 0.0), (0.0, 0.0), (0.2, 0.1)] {
                for x in [-30.0, -6.0, 6.0, 30.0] {
                    let g = eval_g(x, &ch(q.0, q.1), &noise).unwrap();
                    assert!(g.is_finite() && g >= 0.0, "β = {beta}, x = {x}, {g}");
                    if x.abs() < 10.0 && beta <= 2.0 {
                        assert!(g > 0.0, "β = {beta}, x = {x}");
                    }
                }
            }
        }
    }

    #[test]
    fn log_space_switch_is_continuous() {
        let noise = ggn(1.0, 1.5);
        let chan = ch(0.7, 0.0);
        let r = LOG_SPACE_RADIUS;
        let inside = g_unchecked(r - 1e-9, &chan, &noise);
        let outside = g_unchecked(r + 1e-9, &chan, &noise);
        assert!((inside - outside).abs() < 1e-7 * inside);
    }

    #[test]
    fn g_prime_zero_for_symmetric_channel() {
        for beta in [1.5, 2.0, 3.0, 8.0] {
            let d = eval_g_prime(0.0, &ch(0.2, 0.2), &ggn(1.0, beta)).unwrap();
            assert!(d.abs() < 1e-14, "β = {beta}: {d}");
        }
    }

    #[test]
    fn g_prime_vanishes_at_table_optimum() {
        // 0.3682 is rounded to four decimals and |G''| is about 7 there, so
        // G' is only small up to that rounding; the root itself must sit
        // within half a unit of the last decimal.
        let (noise, chan) = (ggn(1.0, 2.0), ch(0.7, 0.0));
        let d = eval_g_prime(0.3682, &chan, &noise).unwrap();
        assert!(d.abs() < 5e-4, "{d}");
        assert!(eval_g_prime(0.36815, &chan, &noise).unwrap() > 0.0);
        assert!(eval_g_prime(0.36825, &chan, &noise).unwrap() < 0.0);
    }

    #[test]
    fn g_decreasing_for_heavy_tails() {
        for x in [0.1, 0.5, 1.0] {
            assert!(eval_g_prime(x, &ch(0.7, 0.0), &ggn(1.0, 0.5)).unwrap() < 0.0);
        }
    }

    #[test]
    fn g_prime_matches_central_difference() {
        let h = 1e-6;
        for beta in [0.5, 1.0, 1.5, 2.0, 4.0, 8.0] {
            for alpha in [0.5, 1.0, 2.0] {
                let noise = ggn(alpha, beta);
                for (q0, q1) in [(0.7, 0.0), (0.3, 0.1), (0.1, 0.6), (0.0, 0.0)] {
                    let chan = ch(q0, q1);
                    for x in [-0.8, -0.2, 0.05, 0.3, 0.9] {
                        let x = x / alpha;
                        let fd = (eval_g(x + h, &chan, &noise).unwrap()
                            - eval_g(x - h, &chan, &noise).unwrap())
                            / (2.0 * h);
                        let an = eval_g_prime(x, &chan, &noise).unwrap();
                        let scale = an.abs().max(1e-3 * alpha.powi(3));
                        assert!(
                            (fd - an).abs() < 1e-6 * scale,
                            "β = {beta}, α = {alpha}, x = {x}: {fd} vs {an}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn factored_derivative_agrees_with_quotient_rule() {
        for beta in [0.7, 1.0, 1.5, 2.0, 3.0, 8.0] {
            let noise = ggn(1.2, beta);
            for (q0, q1) in [(0.7, 0.0), (0.4, 0.2), (0.1, 0.1)] {
                let c = canonicalize(ch(q0, q1)).unwrap();
                for x in [0.02, 0.2, 0.6, 1.0] {
                    let a = eval_g_prime_factored(x, &c, &noise).unwrap();
                    let b = eval_g_prime(x, &c.channel(), &noise).unwrap();
                    assert!(
                        (a - b).abs() < 1e-10 * b.abs().max(1e-12),
                        "β = {beta}, x = {x}: {a} vs {b}"
                    );
                }
            }
        }
    }

    #[test]
    fn m_family_rejects_nonpositive_x() {
        let c = canonicalize(ch(0.7, 0.0)).unwrap();
        assert!(eval_m_family(0.0, &c, &ggn(1.0, 2.0)).is_err());
        assert!(eval_m_family(-0.3, &c, &ggn(1.0, 2.0)).is_err());
    }

    #[test]
    fn m_family_orderings_and_derivatives() {
        let h = 1e-6;
        for beta in [0.6, 1.0, 1.5, 2.0, 2.779, 4.0, 8.0] {
            for alpha in [0.5, 1.0, 2.0] {
                let noise = ggn(alpha, beta);
                for (q0, q1) in [(0.7, 0.0), (0.3, 0.1), (0.2, 0.2)] {
                    let c = canonicalize(ch(q0, q1)).unwrap();
                    let mut x = 0.05 / alpha;
                    while x <= 2.0 / alpha {
                        let fam = eval_m_family(x, &c, &noise).unwrap();
                        assert!(fam.m2 > fam.m1 && fam.m1 > 0.0);
                        let up = eval_m_family(x + h, &c, &noise).unwrap();
                        let dn = eval_m_family(x - h, &c, &noise).unwrap();
                        let d1 = (up.m - dn.m) / (2.0 * h);
                        let d2 = (up.m_prime - dn.m_prime) / (2.0 * h);
                        let tol1 = 1e-5 * fam.m_prime.abs().max(1e-3 * alpha);
                        let tol2 = 1e-5 * fam.m_second.abs().max(1e-2 * alpha * alpha);
                        assert!(
                            (d1 - fam.m_prime).abs() < tol1,
                            "M' β={beta} α={alpha} x={x}: {d1} vs {}",
                            fam.m_prime
                        );
                        assert!(
                            (d2 - fam.m_second).abs() < tol2,
                            "M'' β={beta} α={alpha} x={x}: {d2} vs {}",
                            fam.m_second
                        );
                        x += 0.05 / alpha;
                    }
                }
            }
        }
    }

    #[test]
    fn m3_at_x1_is_minus_one() {
        for beta in [1.1, 1.5, 2.0, 4.0, 8.0, 30.0] {
            for alpha in [0.3, 1.0, 4.0] {
                let noise = ggn(alpha, beta);
                let x1 = aux_points(&noise).unwrap().x1;
                let c = canonicalize(ch(0.4, 0.1)).unwrap();
                let fam = eval_m_family(x1, &c, &noise).unwrap();
                assert!((fam.m3 + 1.0).abs() < 1e-12, "β = {beta}");
            }
        }
    }

    #[test]
    fn m_prime_signs_at_aux_points() {
        let channels = [(0.7, 0.0), (0.3, 0.1), (0.2, 0.2), (0.0, 0.0), (0.45, 0.05)];
        for beta in [1.5, 2.0, 4.0, 8.0] {
            let noise = ggn(1.0, beta);
            let x1 = aux_points(&noise).unwrap().x1;
            for &(q0, q1) in &channels {
                let c = canonicalize(ch(q0, q1)).unwrap();
                assert!(eval_m_family(x1, &c, &noise).unwrap().m_prime > 0.0);
            }
        }
        for beta in [2.5, 4.0, 8.0] {
            let noise = ggn(1.0, beta);
            let x2 = aux_points(&noise).unwrap().x2.unwrap();
            for &(q0, q1) in &channels {
                let c = canonicalize(ch(q0, q1)).unwrap();
                assert!(
                    eval_m_family(x2, &c, &noise).unwrap().m_prime < 0.0,
                    "β = {beta}"
                );
            }
        }
    }

    #[test]
    fn aux_point_values() {
        let p = aux_points(&ggn(1.0, 2.0)).unwrap();
        assert!((p.x1 - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(p.x2.is_none());
        let p = aux_points(&ggn(1.0, 4.0)).unwrap();
        assert!((p.x2.unwrap() - 0.25f64.powf(0.25)).abs() < 1e-15);
        assert!((p.x1 - 0.75f64.powf(0.25)).abs() < 1e-15);
        let p = aux_points(&ggn(2.0, 200.0)).unwrap();
        assert!((p.x1 - 0.5).abs() < 1e-2);
        assert!(aux_points(&ggn(1.0, 1.0)).is_err());
        for beta in [2.1, 3.0, 10.0, 100.0] {
            let p = aux_points(&ggn(1.7, beta)).unwrap();
            let x2 = p.x2.unwrap();
            assert!(0.0 < x2 && x2 < p.x1 && p.x1 < 1.0 / 1.7);
        }
    }

    #[test]
    fn m_limits() {
        for beta in [1.5, 2.0, 4.0, 8.0] {
            for alpha in [0.5, 1.0, 2.0] {
                let noise = ggn(alpha, beta);
                for (q0, q1) in [(0.7, 0.0), (0.3, 0.1), (0.2, 0.2)] {
                    let c = canonicalize(ch(q0, q1)).unwrap();
                    let near = eval_m_family(1e-6 / alpha, &c, &noise).unwrap().m;
                    assert!(
                        (near - c.m_limit_at_zero()).abs() < 1e-2,
                        "β = {beta}: {near}"
                    );
                }
            }
        }
        for beta in [0.5, 1.0, 2.0, 8.0] {
            let noise = ggn(1.5, beta);
            for (q0, q1) in [(0.7, 0.0), (0.3, 0.1), (0.2, 0.2)] {
                let c = canonicalize(ch(q0, q1)).unwrap();
                let far = 40f64.powf(1.0 / beta) / 1.5;
                let m = eval_m_family(far, &c, &noise).unwrap().m;
                assert!(
                    (m - c.m_limit_at_infinity()).abs() < 1e-9,
                    "β = {beta}: {m}"
                );
            }
        }
    }

    #[test]
    fn g_beats_its_mirror_on_canonical_channels() {
        for beta in [0.5, 1.5, 2.0, 4.0] {
            let noise = ggn(1.0, beta);
            for (q0, q1) in [(0.7, 0.0), (0.3, 0.1)] {
                for x in [0.1, 0.4, 1.0, 2.0] {
                    let chan = ch(q0, q1);
                    assert!(eval_g(x, &chan, &noise).unwrap() > eval_g(-x, &chan, &noise).unwrap());
                }
            }
        }
    }

    #[test]
    fn sign_tolerance() {
        assert_eq!(sign_with_tolerance(1e-13), 0);
        assert_eq!(sign_with_tolerance(-2e-12), -1);
        assert_eq!(sign_with_tolerance(0.5), 1);
    }
}
