//! Generalized Gaussian noise with density
//! `f(w) = αβ / (2Γ(1/β)) · exp(-(α|w|)^β)`.
//!
//! `β = 1` is the Laplace law, `β = 2` a Gaussian with variance `1/(2α²)`,
//! and `β → ∞` tends to the uniform law on `[-1/α, 1/α]`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma};

use crate::error::{domain, Result};
use crate::rng;
use crate::specfun::{inc_gamma_pq, ln_gamma_unchecked, ln_q_unchecked};

/// Scale/shape of the noise. `alpha` is the inverse scale, `beta` the shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GgnParams {
    alpha: f64,
    beta: f64,
    shape: f64,
    ln_gamma_shape: f64,
    ln_norm: f64,
}

impl GgnParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(domain(format!("alpha must be finite and > 0, got {alpha}")));
        }
        if !beta.is_finite() || beta <= 0.0 {
            return Err(domain(format!("beta must be finite and > 0, got {beta}")));
        }
        let shape = 1.0 / beta;
        let ln_gamma_shape = ln_gamma_unchecked(shape);
        Ok(Self {
            alpha,
            beta,
            shape,
            ln_gamma_shape,
            ln_norm: (0.5 * alpha * beta).ln() - ln_gamma_shape,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Same shape, scale multiplied by `1/c`.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(alpha, self.beta)
    }

    /// `(α|w|)^β`
    #[inline]
    fn radial(&self, w: f64) -> f64 {
        (self.alpha * w.abs()).powf(self.beta)
    }

    pub fn pdf(&self, w: f64) -> f64 {
        self.ln_pdf(w).exp()
    }

    #[inline]
    pub fn ln_pdf(&self, w: f64) -> f64 {
        self.ln_norm - self.radial(w)
    }

    /// Derivative of the density, `-sign(w) β α^β |w|^{β-1} f(w)`.
    ///
    /// At `w = 0` this returns the right-hand derivative: 0 for `β > 1`,
    /// `-α f(0)` for `β = 1`, and `-∞` for `β < 1`.
    pub fn pdf_prime(&self, w: f64) -> f64 {
        if w == 0.0 {
            return if self.beta > 1.0 {
                0.0
            } else if self.beta == 1.0 {
                -self.alpha * self.pdf(0.0)
            } else {
                f64::NEG_INFINITY
            };
        }
        -w.signum() * self.score_factor(w) * self.pdf(w)
    }

    /// `β α^β |w|^{β-1}`, the magnitude of `-f'(w)/f(w)`.
    #[inline]
    pub(crate) fn score_factor(&self, w: f64) -> f64 {
        self.beta * self.alpha.powf(self.beta) * w.abs().powf(self.beta - 1.0)
    }

    /// `F(w) = 1/2 + sign(w) P(1/β, (α|w|)^β) / 2`.
    pub fn cdf(&self, w: f64) -> f64 {
        self.cdf_pair(w).0
    }

    /// `1 - F(w)`, without cancellation in the upper tail.
    pub fn sf(&self, w: f64) -> f64 {
        self.cdf_pair(w).1
    }

    /// Returns `(F(w), 1 - F(w))`, each computed from the side on which it
    /// is the small half so that neither suffers cancellation.
    #[inline]
    pub fn cdf_pair(&self, w: f64) -> (f64, f64) {
        if w == 0.0 {
            return (0.5, 0.5);
        }
        let (p, q) = inc_gamma_pq(self.shape, self.radial(w), self.ln_gamma_shape);
        let near = 0.5 * q;
        let far = 0.5 + 0.5 * p;
        if w > 0.0 {
            (far, near)
        } else {
            (near, far)
        }
    }

    /// `ln F(w)`, finite far into the lower tail.
    pub fn ln_cdf(&self, w: f64) -> f64 {
        if w < 0.0 {
            ln_q_unchecked(self.shape, self.radial(w), self.ln_gamma_shape) - std::f64::consts::LN_2
        } else {
            self.cdf(w).ln()
        }
    }

    /// `ln(1 - F(w))`.
    pub fn ln_sf(&self, w: f64) -> f64 {
        self.ln_cdf(-w)
    }

    /// Variance `Γ(3/β) / (α² Γ(1/β))`.
    pub fn variance(&self) -> f64 {
        (ln_gamma_unchecked(3.0 * self.shape) - self.ln_gamma_shape).exp()
            / (self.alpha * self.alpha)
    }

    /// Draws one variate: `S · T^{1/β} / α` with `S` a fair sign and
    /// `T ~ Gamma(1/β, 1)`.
    #[inline]
    pub(crate) fn draw<R: Rng + ?Sized>(&self, gamma: &Gamma<f64>, rng: &mut R) -> f64 {
        let t: f64 = gamma.sample(rng);
        let magnitude = t.powf(self.shape) / self.alpha;
        if rng.random::<bool>() {
            magnitude
        } else {
            -magnitude
        }
    }

    pub(crate) fn gamma_law(&self) -> Gamma<f64> {
        Gamma::new(self.shape, 1.0).expect("shape 1/β is finite and positive")
    }

    /// Fills `out` with i.i.d. draws from `rng`.
    pub fn fill<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        let gamma = self.gamma_law();
        for w in out {
            *w = self.draw(&gamma, rng);
        }
    }

    /// `n` i.i.d. draws, deterministic in `seed`.
    pub fn sample(&self, seed: u64, n: usize) -> Result<Vec<f64>> {
        if n == 0 {
            return Err(domain("sample size must be at least 1"));
        }
        let mut rng: ChaCha8Rng = rng::stream(seed, 0);
        let mut out = vec![0.0; n];
        self.fill(&mut rng, &mut out);
        Ok(out)
    }
}
