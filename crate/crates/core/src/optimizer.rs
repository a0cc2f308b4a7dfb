//! Optimal threshold solver.
//!
//! The maximizer of `G` is known in closed form in two regimes:
//!
//! * `β ≤ 1` (any informative channel): `G` decreases on `(0, ∞)` in the
//!   canonical frame, so `x* = 0`.
//! * symmetric channel with `β ≤ 2`: `G` is even and decreasing on
//!   `(0, ∞)`, so again `x* = 0`.
//!
//! Everywhere else `G` is quasiconcave on `(0, ∞)` with its single
//! stationary point below `x1 < 1/α`, and a projected gradient ascent with
//! Armijo backtracking on `(0, 1/α)` finds it.

use std::fmt;

use crate::error::{domain, Error, Result};
use crate::ggn::GgnParams;
use crate::objective::{aux_points, canonicalize, g_prime_unchecked, g_unchecked, ChannelParams};

/// Sufficient-increase constant of the line search.
pub const ARMIJO: f64 = 0.4;
/// Step shrink factor of the line search.
pub const SHRINK: f64 = 0.5;
pub const MAX_ITERATIONS: usize = 10_000;
/// The ascent stops once `|G'| < GRAD_TOL_FACTOR · α³`.
pub const GRAD_TOL_FACTOR: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveCase {
    /// `x* = 0` by the shape analysis, no iteration performed.
    AnalyticZero,
    /// Unique interior maximizer found by gradient ascent.
    NumericUnimodal,
    /// Symmetric channel with `β > 2`: two optima `±x*`.
    BscPair,
}

impl SolveCase {
    pub fn label(self) -> &'static str {
        match self {
            SolveCase::AnalyticZero => "analytic-zero",
            SolveCase::NumericUnimodal => "numeric-unimodal",
            SolveCase::BscPair => "bsc-pair",
        }
    }
}

impl fmt::Display for SolveCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSolution {
    /// Maximizer of `G` for the original channel.
    pub x_star: f64,
    /// Optimal quantizer threshold, `−x_star`.
    pub tau_star: f64,
    /// The mirrored optimum when the channel is symmetric and `β > 2`.
    pub also_tau: Option<f64>,
    pub g_value: f64,
    pub case: SolveCase,
    pub iterations: usize,
    /// `(x, G(x))` along the ascent, in the canonical frame.
    pub trace: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AscentOptions {
    pub grad_tol: f64,
    pub initial_step: f64,
    pub armijo: f64,
    pub shrink: f64,
    pub max_iterations: usize,
}

impl AscentOptions {
    /// Settings for maximizing `G` under noise with inverse scale `alpha`.
    ///
    /// `G'` scales like `α³` and the curvature like `α⁴`, so the tolerance
    /// and the initial trial step are expressed in those units; the whole
    /// iteration is then equivariant under `α → cα`.
    pub fn for_scale(alpha: f64) -> Self {
        Self {
            grad_tol: GRAD_TOL_FACTOR * alpha.powi(3),
            initial_step: alpha.powi(-4),
            armijo: ARMIJO,
            shrink: SHRINK,
            max_iterations: MAX_ITERATIONS,
        }
    }
}

impl Default for AscentOptions {
    fn default() -> Self {
        Self::for_scale(1.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AscentResult {
    pub x_star: f64,
    pub iterations: usize,
    pub trace: Vec<(f64, f64)>,
}

/// Maximizes a smooth scalar function on the open interval `domain`.
///
/// Each step moves along `G'(x_k)`; the step length starts at
/// `opts.initial_step` and is shrunk until the trial point is interior and
/// `G(x_k + tΔ) ≥ G(x_k) + armijo · t · G'(x_k) Δ`.
pub fn gradient_ascent<F, D>(
    objective: F,
    derivative: D,
    domain: (f64, f64),
    x_init: f64,
    opts: &AscentOptions,
) -> Result<AscentResult>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let (lo, hi) = domain;
    if !(x_init > lo && x_init < hi) {
        return Err(crate::error::domain(format!(
            "initial point {x_init} not inside ({lo}, {hi})"
        )));
    }

    let mut x = x_init;
    let mut value = objective(x);
    let mut trace = vec![(x, value)];

    for k in 0..opts.max_iterations {
        let grad = derivative(x);
        if grad.abs() < opts.grad_tol {
            return Ok(AscentResult {
                x_star: x,
                iterations: k,
                trace,
            });
        }

        let direction = grad;
        let mut t = opts.initial_step;
        let (next, next_value) = loop {
            let candidate = x + t * direction;
            if candidate > lo && candidate < hi {
                let candidate_value = objective(candidate);
                if candidate_value >= value + opts.armijo * t * grad * direction {
                    break (candidate, candidate_value);
                }
            }
            t *= opts.shrink;
            if (t * direction).abs() <= f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
                return Err(Error::LineSearchStalled { x, grad });
            }
        };
        x = next;
        value = next_value;
        trace.push((x, value));
    }

    let last_grad = derivative(x);
    Err(Error::NonConvergence {
        iterations: opts.max_iterations,
        last_x: x,
        last_grad,
        trace,
    })
}

/// Locates the sign change of a decreasing-through-zero `derivative` on
/// `(lo, hi)`, halving geometrically while the bracket spans decades.
/// A lower end of 0 is replaced by the smallest positive normal.
fn bisect_sign<D: Fn(f64) -> f64>(derivative: D, lo: f64, hi: f64) -> (f64, usize) {
    let mut lo = lo.max(f64::MIN_POSITIVE);
    let mut hi = hi;
    if derivative(lo) <= 0.0 {
        return (lo, 0);
    }
    let mut iterations = 0;
    while iterations < 2_000 {
        let mid = if hi > 4.0 * lo {
            (lo * hi).sqrt()
        } else {
            0.5 * (lo + hi)
        };
        if mid <= lo || mid >= hi {
            break;
        }
        if derivative(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    (0.5 * (lo + hi), iterations)
}

/// Computes the threshold maximizing the asymptotic noncentrality.
pub fn solve_threshold(noise: &GgnParams, channel: &ChannelParams) -> Result<ThresholdSolution> {
    let canonical = canonicalize(*channel)?;
    let beta = noise.beta();

    if beta <= 1.0 || (canonical.is_symmetric() && beta <= 2.0) {
        return Ok(ThresholdSolution {
            x_star: 0.0,
            tau_star: 0.0,
            also_tau: None,
            g_value: g_unchecked(0.0, channel, noise),
            case: SolveCase::AnalyticZero,
            iterations: 0,
            trace: Vec::new(),
        });
    }

    let alpha = noise.alpha();
    let canon = canonical.channel();
    let x1 = aux_points(noise)?.x1;
    let derivative = |x: f64| g_prime_unchecked(x, &canon, noise);
    let ascent = match gradient_ascent(
        |x| g_unchecked(x, &canon, noise),
        derivative,
        (0.0, 1.0 / alpha),
        0.5 * x1,
        &AscentOptions::for_scale(alpha),
    ) {
        // For β just above 1 the maximizer can sit many decades below 1/α,
        // where G is flat to machine precision but G' keeps a clean sign.
        Err(Error::LineSearchStalled { x, grad }) => {
            let (lo, hi) = if grad < 0.0 {
                (0.0, x)
            } else {
                (x, 1.0 / alpha)
            };
            let (x_star, iterations) = bisect_sign(derivative, lo, hi);
            AscentResult {
                x_star,
                iterations,
                trace: vec![(x_star, g_unchecked(x_star, &canon, noise))],
            }
        }
        other => other?,
    };

    let x_star = canonical.to_original(ascent.x_star);
    let case = if canonical.is_symmetric() {
        SolveCase::BscPair
    } else {
        SolveCase::NumericUnimodal
    };
    Ok(ThresholdSolution {
        x_star,
        tau_star: -x_star,
        also_tau: (case == SolveCase::BscPair).then_some(x_star),
        g_value: g_unchecked(x_star, channel, noise),
        case,
        iterations: ascent.iterations,
        trace: ascent.trace,
    })
}

/// Convenience wrapper taking raw parameters.
pub fn solve(alpha: f64, beta: f64, q0: f64, q1: f64) -> Result<ThresholdSolution> {
    let noise = GgnParams::new(alpha, beta)?;
    let channel = ChannelParams::new(q0, q1)?;
    solve_threshold(&noise, &channel)
}

/// Brute-force maximum of `G` over an `n`-point grid of `(lo, hi)`.
pub fn grid_argmax(
    noise: &GgnParams,
    channel: &ChannelParams,
    lo: f64,
    hi: f64,
    n: usize,
) -> Result<(f64, f64)> {
    if n < 2 || !(hi > lo) {
        return Err(domain("grid needs n >= 2 points and hi > lo"));
    }
    let mut best = (lo, f64::NEG_INFINITY);
    for i in 0..n {
        let x = lo + (hi - lo) * i as f64 / (n - 1) as f64;
        let g = crate::objective::eval_g(x, channel, noise)?;
        if g > best.1 {
            best = (x, g);
        }
    }
    Ok(best)
}
