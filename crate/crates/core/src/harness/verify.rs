//! Numerical checks of the structural facts behind the threshold solver.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};
use crate::ggn::GgnParams;
use crate::objective::{
    aux_points, canonicalize, eval_g, eval_g_prime, eval_m_family, sign_with_tolerance,
    symmetry_residual, ChannelParams,
};
use crate::optimizer::solve_threshold;
use crate::rng;
use crate::specfun::log_gamma;

pub const SYMMETRY_TOLERANCE: f64 = 1e-10;
pub const UNIMODALITY_POINTS: usize = 10_000;
pub const SCALAR_TOLERANCE: f64 = 1e-3;
/// Maximum of the log-ratio bound on `(0, 1/2)` and its location.
pub const BOUND_MAX_AT: f64 = 0.4609;
pub const BOUND_MAX_VALUE: f64 = -0.60542;
pub const LN_GAMMA_BOUND: f64 = -0.2430;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VerifyScope {
    /// Equality of the four channel relabelings of `G`.
    Symmetry,
    /// `sign G′ = sign M` on the positive axis of the canonical frame.
    Sign,
    /// `M′(x1) > 0` for `β > 1`.
    SlopeX1,
    /// `M′(x2) < 0` for `β > 2`.
    SlopeX2,
    /// At most one turn of `G` on `(0, 1/α)`.
    Unimodality,
    /// `M` at `0⁺` and at infinity.
    Limits,
    /// Scalar bounds behind the light-tail case.
    GammaBound,
}

impl VerifyScope {
    pub const ALL: [VerifyScope; 7] = [
        VerifyScope::Symmetry,
        VerifyScope::Sign,
        VerifyScope::SlopeX1,
        VerifyScope::SlopeX2,
        VerifyScope::Unimodality,
        VerifyScope::Limits,
        VerifyScope::GammaBound,
    ];

    pub fn name(self) -> &'static str {
        match self {
            VerifyScope::Symmetry => "symmetry",
            VerifyScope::Sign => "sign",
            VerifyScope::SlopeX1 => "slope-x1",
            VerifyScope::SlopeX2 => "slope-x2",
            VerifyScope::Unimodality => "unimodality",
            VerifyScope::Limits => "limits",
            VerifyScope::GammaBound => "gamma-bound",
        }
    }
}

impl fmt::Display for VerifyScope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VerifyScope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        // older alias of the scalar-bound scope
        let s = match s.trim() {
            "appendix-d" => "gamma-bound",
            other => other,
        };
        VerifyScope::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown verification scope `{s}`")))
    }
}

/// One `(α, β, q0, q1)` configuration of the sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelPoint {
    pub noise: GgnParams,
    pub channel: ChannelParams,
}

impl fmt::Display for ModelPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "alpha={} beta={} q0={} q1={}",
            self.noise.alpha(),
            self.noise.beta(),
            self.channel.q0,
            self.channel.q1
        )
    }
}

/// Scales, shapes and channels covering every solver branch.
pub fn default_sweep() -> Vec<ModelPoint> {
    let mut out = Vec::new();
    for alpha in [0.5, 1.0, 3.0] {
        for beta in [0.5, 1.0, 1.2, 1.5, 2.0, 2.5, 2.779, 4.0, 8.0] {
            for (q0, q1) in [
                (0.7, 0.0),
                (0.3, 0.1),
                (0.2, 0.2),
                (0.0, 0.0),
                (0.1, 0.4),
                (0.9, 0.4),
                (0.05, 0.6),
            ] {
                out.push(ModelPoint {
                    noise: GgnParams::new(alpha, beta).expect("valid sweep"),
                    channel: ChannelParams::new(q0, q1).expect("valid sweep"),
                });
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub scope: VerifyScope,
    pub summary: String,
    /// Configurations that violated the check.
    pub failures: Vec<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct VerifyReport {
    pub outcomes: Vec<CheckOutcome>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(CheckOutcome::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = (&VerifyScope, &String)> {
        self.outcomes
            .iter()
            .flat_map(|o| o.failures.iter().map(move |f| (&o.scope, f)))
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for o in &self.outcomes {
            let status = if o.passed() { "PASS" } else { "FAIL" };
            writeln!(f, "[{status}] {:<12} {}", o.scope.name(), o.summary)?;
            for fail in o.failures.iter().take(20) {
                writeln!(f, "    {fail}")?;
            }
            if o.failures.len() > 20 {
                writeln!(f, "    ... {} more", o.failures.len() - 20)?;
            }
        }
        Ok(())
    }
}

/// Runs the requested checks over `sweep`; an empty `scopes` runs all.
pub fn verify_propositions(sweep: &[ModelPoint], scopes: &[VerifyScope]) -> Result<VerifyReport> {
    let scopes: Vec<VerifyScope> = if scopes.is_empty() {
        VerifyScope::ALL.to_vec()
    } else {
        scopes.to_vec()
    };
    let mut report = VerifyReport::default();
    for scope in scopes {
        report.outcomes.push(match scope {
            VerifyScope::Symmetry => check_symmetry(sweep)?,
            VerifyScope::Sign => check_sign(sweep)?,
            VerifyScope::SlopeX1 => check_slopes(sweep, true)?,
            VerifyScope::SlopeX2 => check_slopes(sweep, false)?,
            VerifyScope::Unimodality => check_unimodality(sweep)?,
            VerifyScope::Limits => check_limits(sweep)?,
            VerifyScope::GammaBound => check_scalars()?,
        });
    }
    Ok(report)
}

fn check_symmetry(sweep: &[ModelPoint]) -> Result<CheckOutcome> {
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    let mut record = |x: f64, point: &ModelPoint| -> Result<()> {
        let r = symmetry_residual(x, &point.channel, &point.noise)?;
        worst = worst.max(r);
        if !(r < SYMMETRY_TOLERANCE) {
            failures.push(format!("{point} x={x}: residual {r:e}"));
        }
        Ok(())
    };

    let mut rng = rng::stream(0x5eed, 1);
    let mut tuples = 0;
    while tuples < 1000 {
        let alpha = rng.random_range(0.3..3.0);
        let beta = rng.random_range(0.3..10.0);
        let (q0, q1) = (rng.random_range(0.0..1.0), rng.random_range(0.0..1.0));
        if (1.0f64 - q0 - q1).abs() < 0.05 {
            continue;
        }
        let point = ModelPoint {
            noise: GgnParams::new(alpha, beta)?,
            channel: ChannelParams::new(q0, q1)?,
        };
        let x = rng.random_range(-3.0..3.0) / alpha;
        record(x, &point)?;
        tuples += 1;
    }
    for point in sweep {
        for u in [-2.0, -0.4, 0.0, 0.3, 1.7] {
            record(u / point.noise.alpha(), point)?;
        }
    }
    Ok(CheckOutcome {
        scope: VerifyScope::Symmetry,
        summary: format!("max relative residual {worst:.3e} (tolerance {SYMMETRY_TOLERANCE:e})"),
        failures,
    })
}

fn check_sign(sweep: &[ModelPoint]) -> Result<CheckOutcome> {
    let mut failures = Vec::new();
    let mut compared = 0usize;
    for point in sweep {
        let canonical = canonicalize(point.channel)?;
        let chan = canonical.channel();
        let alpha = point.noise.alpha();
        for i in 1..=200 {
            let x = 2.0 * i as f64 / 200.0 / alpha;
            let dg = sign_with_tolerance(eval_g_prime(x, &chan, &point.noise)?);
            let m = sign_with_tolerance(eval_m_family(x, &canonical, &point.noise)?.m);
            if dg == 0 || m == 0 {
                continue;
            }
            compared += 1;
            if dg != m {
                failures.push(format!("{point} x={x}: sign G' = {dg}, sign M = {m}"));
            }
        }
    }
    Ok(CheckOutcome {
        scope: VerifyScope::Sign,
        summary: format!("{compared} grid points compared"),
        failures,
    })
}

fn check_slopes(sweep: &[ModelPoint], at_x1: bool) -> Result<CheckOutcome> {
    let mut failures = Vec::new();
    let mut checked = 0usize;
    for point in sweep {
        let beta = point.noise.beta();
        if (at_x1 && beta <= 1.0) || (!at_x1 && beta <= 2.0) {
            continue;
        }
        let aux = aux_points(&point.noise)?;
        let x = if at_x1 {
            aux.x1
        } else {
            aux.x2.expect("defined for beta > 2")
        };
        let canonical = canonicalize(point.channel)?;
        let slope = eval_m_family(x, &canonical, &point.noise)?.m_prime;
        checked += 1;
        let ok = if at_x1 { slope > 0.0 } else { slope < 0.0 };
        if !ok {
            failures.push(format!("{point}: M'({x}) = {slope:e}"));
        }
    }
    let (scope, text) = if at_x1 {
        (VerifyScope::SlopeX1, "M'(x1) > 0")
    } else {
        (VerifyScope::SlopeX2, "M'(x2) < 0")
    };
    Ok(CheckOutcome {
        scope,
        summary: format!("{text} on {checked} configurations"),
        failures,
    })
}

/// Sign changes of successive differences of `G` on an open grid of
/// `(0, 1/α)`, in the canonical frame.
pub fn difference_sign_changes(point: &ModelPoint, points: usize) -> Result<usize> {
    let chan = canonicalize(point.channel)?.channel();
    let alpha = point.noise.alpha();
    let mut prev_g = None;
    let mut prev_sign = 0i8;
    let mut changes = 0;
    for i in 1..=points {
        let x = i as f64 / (points + 1) as f64 / alpha;
        let g = eval_g(x, &chan, &point.noise)?;
        if let Some(p) = prev_g {
            let s = if g > p {
                1
            } else if g < p {
                -1
            } else {
                0
            };
            if s != 0 {
                if prev_sign != 0 && s != prev_sign {
                    changes += 1;
                }
                prev_sign = s;
            }
        }
        prev_g = Some(g);
    }
    Ok(changes)
}

fn check_unimodality(sweep: &[ModelPoint]) -> Result<CheckOutcome> {
    let mut failures = Vec::new();
    for point in sweep {
        let changes = difference_sign_changes(point, UNIMODALITY_POINTS)?;
        // a turn is only visible once the maximizer clears the first cells
        let cell = 1.0 / (UNIMODALITY_POINTS + 1) as f64;
        let ax = point.noise.alpha() * solve_threshold(&point.noise, &point.channel)?.x_star.abs();
        let ok = match changes {
            0 => ax < 2.0 * cell,
            1 => ax > cell,
            _ => false,
        };
        if !ok {
            failures.push(format!(
                "{point}: {changes} sign changes with alpha*|x*| = {ax:e}"
            ));
        }
    }
    Ok(CheckOutcome {
        scope: VerifyScope::Unimodality,
        summary: format!(
            "{} configurations on {UNIMODALITY_POINTS} points",
            sweep.len()
        ),
        failures,
    })
}

fn check_limits(sweep: &[ModelPoint]) -> Result<CheckOutcome> {
    let mut failures = Vec::new();
    for point in sweep {
        let (alpha, beta) = (point.noise.alpha(), point.noise.beta());
        let canonical = canonicalize(point.channel)?;
        if beta > 1.0 {
            // the approach to the limit is of order αx + (αx)^(β−1)
            let near = (1e-6f64).powf(1.0 / (beta - 1.0)).clamp(1e-300, 1e-6) / alpha;
            let m = eval_m_family(near, &canonical, &point.noise)?.m;
            let limit = canonical.m_limit_at_zero();
            if !((m - limit).abs() < 1e-3) {
                failures.push(format!("{point}: M({near:e}) = {m}, limit {limit}"));
            }
        }
        let far = 40f64.powf(1.0 / beta) / alpha;
        let m = eval_m_family(far, &canonical, &point.noise)?.m;
        let limit = canonical.m_limit_at_infinity();
        if !((m - limit).abs() < 1e-9) {
            failures.push(format!("{point}: M({far}) = {m}, limit {limit}"));
        }
    }
    Ok(CheckOutcome {
        scope: VerifyScope::Limits,
        summary: format!(
            "limits at 0+ and infinity on {} configurations",
            sweep.len()
        ),
        failures,
    })
}

/// `2 ln t + 2t − 1 + (3 − 2t) ln 2 + (2t − 1) ln(1 − 2t) + ln(1 − t)`.
pub fn log_ratio_bound(t: f64) -> f64 {
    2.0 * t.ln() + 2.0 * t - 1.0
        + (3.0 - 2.0 * t) * std::f64::consts::LN_2
        + (2.0 * t - 1.0) * (1.0 - 2.0 * t).ln()
        + (1.0 - t).ln()
}

/// Maximizer and maximum of [`log_ratio_bound`] on `(0, 1/2)` by golden section.
pub fn log_ratio_bound_max() -> (f64, f64) {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (1e-9, 0.5 - 1e-9);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (log_ratio_bound(c), log_ratio_bound(d));
    while b - a > 1e-12 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = log_ratio_bound(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = log_ratio_bound(d);
        }
    }
    let t = 0.5 * (a + b);
    (t, log_ratio_bound(t))
}

fn check_scalars() -> Result<CheckOutcome> {
    let mut failures = Vec::new();
    let (t, q) = log_ratio_bound_max();
    let at_table = log_ratio_bound(BOUND_MAX_AT);
    let lg = 2.0 * log_gamma(1.461)?;
    if (t - BOUND_MAX_AT).abs() > SCALAR_TOLERANCE {
        failures.push(format!("maximizer t = {t:.6}, expected {BOUND_MAX_AT}"));
    }
    if (q - BOUND_MAX_VALUE).abs() > SCALAR_TOLERANCE
        || (at_table - BOUND_MAX_VALUE).abs() > SCALAR_TOLERANCE
    {
        failures.push(format!(
            "maximum {q:.6} (Q({BOUND_MAX_AT}) = {at_table:.6}), expected {BOUND_MAX_VALUE}"
        ));
    }
    if (lg - LN_GAMMA_BOUND).abs() > SCALAR_TOLERANCE {
        failures.push(format!("2 lnΓ(1.461) = {lg:.6}, expected {LN_GAMMA_BOUND}"));
    }
    if !(q < lg) {
        failures.push(format!(
            "bound maximum {q:.6} is not below 2 lnΓ(1.461) = {lg:.6}"
        ));
    }
    Ok(CheckOutcome {
        scope: VerifyScope::GammaBound,
        summary: format!("Q max at t = {t:.4}: Q = {q:.5}, Q({BOUND_MAX_AT}) = {at_table:.5}; 2 lnGamma(1.461) = {lg:.4}"),
        failures,
    })
}
