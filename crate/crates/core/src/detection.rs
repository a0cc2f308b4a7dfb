//! Distributed detection of a weak common amplitude from one-bit sensor
//! outputs sent over a binary channel.
//!
//! Sensor `i` at time `j` observes `h_ij θ + w_ij`, quantizes it against
//! `τ_ij`, and the bit is flipped by the channel before it reaches the
//! fusion center. The received bit is one with probability
//! `p_ij(θ) = q0 + (1 − q0 − q1) F(h_ij θ − τ_ij)`.

use std::collections::HashMap;
use std::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Error, Result};
use crate::ggn::GgnParams;
use crate::objective::{eval_g, ChannelParams};
use crate::rng;
use crate::specfun::Probability;

/// Points in the coarse likelihood scan over `[−Δ, Δ]`. Odd, so `θ = 0`
/// is a grid point.
pub const ML_GRID_POINTS: usize = 129;

/// Floor applied to probabilities inside logarithms during estimation.
const PROB_FLOOR: f64 = 1e-300;

const GOLDEN_TOL: f64 = 1e-7;

/// Signal shape `h` and quantizer thresholds `τ`, both `n × k` row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorField {
    n: usize,
    k: usize,
    h: Vec<f64>,
    tau: Vec<f64>,
}

impl SensorField {
    pub fn new(n: usize, k: usize, h: Vec<f64>, tau: Vec<f64>) -> Result<Self> {
        if n == 0 || k == 0 {
            return Err(domain("sensor field needs n >= 1 and k >= 1"));
        }
        if h.len() != n * k || tau.len() != n * k {
            return Err(domain(format!(
                "h and tau must both have n*k = {} entries (got {} and {})",
                n * k,
                h.len(),
                tau.len()
            )));
        }
        if h.iter().chain(&tau).any(|v| !v.is_finite()) {
            return Err(domain("h and tau entries must be finite"));
        }
        Ok(Self { n, k, h, tau })
    }

    /// Field with `h_ij = shape(i, j)` (zero-based indices) and a common
    /// threshold.
    pub fn from_fn(
        n: usize,
        k: usize,
        tau: f64,
        shape: impl Fn(usize, usize) -> f64,
    ) -> Result<Self> {
        let h = (0..n)
            .flat_map(|i| (0..k).map(move |j| (i, j)))
            .map(|(i, j)| shape(i, j))
            .collect();
        Self::new(n, k, h, vec![tau; n * k])
    }

    pub fn homogeneous(n: usize, k: usize, h: f64, tau: f64) -> Result<Self> {
        Self::new(n, k, vec![h; n * k], vec![tau; n * k])
    }

    /// Same signal, every threshold replaced by `tau`.
    pub fn with_threshold(&self, tau: f64) -> Result<Self> {
        Self::new(self.n, self.k, self.h.clone(), vec![tau; self.len()])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn h(&self, i: usize, j: usize) -> f64 {
        self.h[i * self.k + j]
    }

    pub fn tau(&self, i: usize, j: usize) -> f64 {
        self.tau[i * self.k + j]
    }

    pub fn h_values(&self) -> &[f64] {
        &self.h
    }

    pub fn tau_values(&self) -> &[f64] {
        &self.tau
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionScenario {
    pub field: SensorField,
    /// Amplitude used when simulating the alternative.
    pub theta: f64,
    /// The amplitude is known to lie in `[−delta, delta]`.
    pub delta: f64,
    pub noise: GgnParams,
    pub channel: ChannelParams,
}

impl DetectionScenario {
    pub fn new(
        field: SensorField,
        theta: f64,
        delta: f64,
        noise: GgnParams,
        channel: ChannelParams,
    ) -> Result<Self> {
        if !delta.is_finite() || delta <= 0.0 {
            return Err(domain(format!("delta must be finite and > 0, got {delta}")));
        }
        if !theta.is_finite() || theta.abs() > delta {
            return Err(domain(format!(
                "|theta| must not exceed delta = {delta}, got {theta}"
            )));
        }
        Ok(Self {
            field,
            theta,
            delta,
            noise,
            channel,
        })
    }

    fn check_theta(&self, theta: f64) -> Result<()> {
        if theta.is_finite() && theta.abs() <= self.delta {
            Ok(())
        } else {
            Err(domain(format!(
                "theta = {theta} lies outside [-{0}, {0}]",
                self.delta
            )))
        }
    }

    /// `(p, 1 − p)` for entry `idx`, each computed without cancellation.
    #[inline]
    fn prob_pair(&self, idx: usize, theta: f64) -> (f64, f64) {
        prob_pair(
            &self.noise,
            &self.channel,
            self.field.h[idx],
            self.field.tau[idx],
            theta,
        )
    }
}

#[inline]
fn prob_pair(
    noise: &GgnParams,
    channel: &ChannelParams,
    h: f64,
    tau: f64,
    theta: f64,
) -> (f64, f64) {
    let (f, fc) = noise.cdf_pair(h * theta - tau);
    (channel.received_one(f, fc), channel.received_zero(f, fc))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    /// No signal.
    H0,
    /// Signal with the scenario's amplitude.
    H1,
}

impl Hypothesis {
    pub fn is_alternative(self) -> bool {
        self == Hypothesis::H1
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Hypothesis::H0 => "H0",
            Hypothesis::H1 => "H1",
        })
    }
}

/// Bits received at the fusion center, `n × k` row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationMatrix {
    n: usize,
    k: usize,
    bits: Vec<u8>,
}

impl ObservationMatrix {
    pub fn new(n: usize, k: usize, bits: Vec<u8>) -> Result<Self> {
        if n == 0 || k == 0 || bits.len() != n * k {
            return Err(domain(format!("expected {n}x{k} bits, got {}", bits.len())));
        }
        if bits.iter().any(|&b| b > 1) {
            return Err(domain("observation entries must be 0 or 1"));
        }
        Ok(Self { n, k, bits })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.bits[i * self.k + j]
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn ones(&self) -> usize {
        self.bits.iter().map(|&b| b as usize).sum()
    }

    fn check_shape(&self, field: &SensorField) -> Result<()> {
        if self.n == field.n && self.k == field.k {
            Ok(())
        } else {
            Err(domain(format!(
                "observation is {}x{} but the field is {}x{}",
                self.n, self.k, field.n, field.k
            )))
        }
    }
}

/// Simulates the received bits under `hypothesis`, deterministically in `seed`.
pub fn generate(
    scenario: &DetectionScenario,
    hypothesis: Hypothesis,
    seed: u64,
) -> ObservationMatrix {
    let mut rng = rng::stream(seed, 0);
    let mut bits = vec![0u8; scenario.field.len()];
    generate_into(scenario, hypothesis, &mut rng, &mut bits);
    ObservationMatrix {
        n: scenario.field.n,
        k: scenario.field.k,
        bits,
    }
}

/// One noise draw and one channel uniform per entry, in row-major order.
pub(crate) fn generate_into(
    scenario: &DetectionScenario,
    hypothesis: Hypothesis,
    rng: &mut ChaCha8Rng,
    out: &mut [u8],
) {
    let theta = if hypothesis.is_alternative() {
        scenario.theta
    } else {
        0.0
    };
    let gamma = scenario.noise.gamma_law();
    let ChannelParams { q0, q1 } = scenario.channel;
    let field = &scenario.field;
    for ((bit, &h), &tau) in out.iter_mut().zip(&field.h).zip(&field.tau) {
        let w = scenario.noise.draw(&gamma, rng);
        let sent = h * theta + w >= tau;
        let v: f64 = rng.random();
        let received = if sent { v >= q1 } else { v < q0 };
        *bit = received as u8;
    }
}

/// Probability that entry `(i, j)` is received as one at amplitude `theta`.
pub fn success_prob(
    scenario: &DetectionScenario,
    i: usize,
    j: usize,
    theta: f64,
) -> Result<Probability> {
    let field = &scenario.field;
    if i >= field.n || j >= field.k {
        return Err(domain(format!(
            "index ({i}, {j}) outside {}x{} field",
            field.n, field.k
        )));
    }
    if !theta.is_finite() {
        return Err(domain("theta must be finite"));
    }
    Probability::new(scenario.prob_pair(i * field.k + j, theta).0)
}

/// Log-likelihood of the received bits at amplitude `theta`.
///
/// A bit that contradicts an exact `p ∈ {0, 1}` yields `−∞`.
pub fn log_likelihood(
    u: &ObservationMatrix,
    scenario: &DetectionScenario,
    theta: f64,
) -> Result<f64> {
    u.check_shape(&scenario.field)?;
    scenario.check_theta(theta)?;
    let mut total = 0.0;
    for (idx, &bit) in u.bits.iter().enumerate() {
        let (p, pc) = scenario.prob_pair(idx, theta);
        total += if bit == 1 { p.ln() } else { pc.ln() };
    }
    Ok(total)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlEstimate {
    pub theta_hat: f64,
    pub log_likelihood: f64,
    /// The maximizer sits on `±Δ`.
    pub at_boundary: bool,
}

/// Entries sharing the same `(h, τ)` pair.
#[derive(Debug, Clone, Copy)]
struct Group {
    h: f64,
    tau: f64,
    size: u32,
}

/// Number of received ones per `(h, τ)` group; the likelihood depends on
/// the observation only through these counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupCounts(Vec<u32>);

/// Likelihood of one scenario with the per-group log-probabilities on
/// the ML grid tabulated once and reused across observations.
#[derive(Debug, Clone)]
pub struct LikelihoodModel {
    noise: GgnParams,
    channel: ChannelParams,
    delta: f64,
    groups: Vec<Group>,
    entry_group: Vec<u32>,
    grid: Vec<f64>,
    // [group][grid point]
    ln_p: Vec<f64>,
    ln_pc: Vec<f64>,
    // score contributions of a one and a zero at θ = 0
    score_one: Vec<f64>,
    score_zero: Vec<f64>,
    info_zero: f64,
}

impl LikelihoodModel {
    pub fn new(scenario: &DetectionScenario) -> Self {
        let field = &scenario.field;
        let mut index: HashMap<(u64, u64), u32> = HashMap::new();
        let mut groups: Vec<Group> = Vec::new();
        let mut entry_group = Vec::with_capacity(field.len());
        for (&h, &tau) in field.h.iter().zip(&field.tau) {
            let g = *index
                .entry((h.to_bits(), tau.to_bits()))
                .or_insert_with(|| {
                    groups.push(Group { h, tau, size: 0 });
                    (groups.len() - 1) as u32
                });
            groups[g as usize].size += 1;
            entry_group.push(g);
        }

        let delta = scenario.delta;
        let last = (ML_GRID_POINTS - 1) as f64;
        let grid: Vec<f64> = (0..ML_GRID_POINTS)
            .map(|m| delta * (2.0 * m as f64 - last) / last)
            .collect();

        let (noise, channel) = (scenario.noise, scenario.channel);
        let mut ln_p = Vec::with_capacity(groups.len() * ML_GRID_POINTS);
        let mut ln_pc = Vec::with_capacity(groups.len() * ML_GRID_POINTS);
        for g in &groups {
            for &theta in &grid {
                let (p, pc) = prob_pair(&noise, &channel, g.h, g.tau, theta);
                ln_p.push(p.max(PROB_FLOOR).ln());
                ln_pc.push(pc.max(PROB_FLOOR).ln());
            }
        }

        let gain = channel.gain();
        let mut score_one = Vec::with_capacity(groups.len());
        let mut score_zero = Vec::with_capacity(groups.len());
        let mut info_zero = 0.0;
        for g in &groups {
            let (p, pc) = prob_pair(&noise, &channel, g.h, g.tau, 0.0);
            let (p, pc) = (p.max(PROB_FLOOR), pc.max(PROB_FLOOR));
            let slope = gain * g.h * noise.pdf(-g.tau);
            score_one.push(slope / p);
            score_zero.push(-slope / pc);
            info_zero += g.size as f64 * slope * slope / (p * pc);
        }

        Self {
            noise,
            channel,
            delta,
            groups,
            entry_group,
            grid,
            ln_p,
            ln_pc,
            score_one,
            score_zero,
            info_zero,
        }
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    /// The `θ` values of the coarse scan.
    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    /// Fisher information at `θ = 0`.
    pub fn info_zero(&self) -> f64 {
        self.info_zero
    }

    pub fn counts(&self, u: &ObservationMatrix) -> GroupCounts {
        self.counts_from_bits(&u.bits)
    }

    pub(crate) fn counts_from_bits(&self, bits: &[u8]) -> GroupCounts {
        let mut ones = vec![0u32; self.groups.len()];
        for (&b, &g) in bits.iter().zip(&self.entry_group) {
            ones[g as usize] += b as u32;
        }
        GroupCounts(ones)
    }

    /// Log-likelihood with floored probabilities.
    pub fn log_likelihood(&self, counts: &GroupCounts, theta: f64) -> f64 {
        let mut total = 0.0;
        for (g, &ones) in self.groups.iter().zip(&counts.0) {
            let (p, pc) = prob_pair(&self.noise, &self.channel, g.h, g.tau, theta);
            let zeros = g.size - ones;
            if ones > 0 {
                total += ones as f64 * p.max(PROB_FLOOR).ln();
            }
            if zeros > 0 {
                total += zeros as f64 * pc.max(PROB_FLOOR).ln();
            }
        }
        total
    }

    /// Log-likelihood at every point of [`Self::grid`].
    pub fn grid_log_likelihood(&self, counts: &GroupCounts) -> Vec<f64> {
        let m = ML_GRID_POINTS;
        let mut acc = vec![0.0; m];
        for (gi, (g, &ones)) in self.groups.iter().zip(&counts.0).enumerate() {
            let (n1, n0) = (ones as f64, (g.size - ones) as f64);
            let lp = &self.ln_p[gi * m..(gi + 1) * m];
            let lpc = &self.ln_pc[gi * m..(gi + 1) * m];
            for ((a, &x), &y) in acc.iter_mut().zip(lp).zip(lpc) {
                *a += n1 * x + n0 * y;
            }
        }
        acc
    }

    /// Maximizes the likelihood over `[−Δ, Δ]`: grid scan, then golden
    /// section inside the cells adjacent to the best grid point.
    pub fn ml_estimate(&self, counts: &GroupCounts) -> MlEstimate {
        let scan = self.grid_log_likelihood(counts);
        let (best, &best_ll) = scan
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .expect("grid is nonempty");
        let lo = self.grid[best.saturating_sub(1)];
        let hi = self.grid[(best + 1).min(ML_GRID_POINTS - 1)];
        let (theta, ll) = golden_section_max(
            |t| self.log_likelihood(counts, t),
            lo,
            hi,
            GOLDEN_TOL * self.delta,
        );

        let (theta_hat, log_likelihood) = if ll > best_ll {
            (theta, ll)
        } else {
            (self.grid[best], best_ll)
        };
        MlEstimate {
            theta_hat,
            log_likelihood,
            at_boundary: theta_hat.abs() >= self.delta,
        }
    }

    /// `max_θ l(θ) − l(0)`.
    pub fn glrt(&self, counts: &GroupCounts) -> f64 {
        let ml = self.ml_estimate(counts);
        let null = self.grid_log_likelihood_at(counts, ML_GRID_POINTS / 2);
        (ml.log_likelihood - null).max(0.0)
    }

    fn grid_log_likelihood_at(&self, counts: &GroupCounts, m: usize) -> f64 {
        self.groups
            .iter()
            .zip(&counts.0)
            .enumerate()
            .map(|(gi, (g, &ones))| {
                let at = gi * ML_GRID_POINTS + m;
                ones as f64 * self.ln_p[at] + (g.size - ones) as f64 * self.ln_pc[at]
            })
            .sum()
    }

    /// Derivative of the log-likelihood at `θ = 0`.
    pub fn score(&self, counts: &GroupCounts) -> f64 {
        self.groups
            .iter()
            .zip(&counts.0)
            .enumerate()
            .map(|(gi, (g, &ones))| {
                ones as f64 * self.score_one[gi] + (g.size - ones) as f64 * self.score_zero[gi]
            })
            .sum()
    }

    /// Squared score over the Fisher information at zero.
    pub fn rao(&self, counts: &GroupCounts) -> Result<f64> {
        if self.info_zero <= 0.0 {
            return Err(Error::Domain("Fisher information at zero vanishes".into()));
        }
        let s = self.score(counts);
        Ok(s * s / self.info_zero)
    }
}

/// Maximizes a unimodal `f` on `[lo, hi]`; returns the best point evaluated.
fn golden_section_max(f: impl Fn(f64) -> f64, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let candidates = [(c, fc), (d, fd), (lo, f(lo)), (hi, f(hi))];
    candidates
        .into_iter()
        .fold((c, f64::NEG_INFINITY), |best, cand| {
            if cand.1 > best.1 {
                cand
            } else {
                best
            }
        })
}

pub fn ml_estimate(u: &ObservationMatrix, scenario: &DetectionScenario) -> Result<MlEstimate> {
    u.check_shape(&scenario.field)?;
    let model = LikelihoodModel::new(scenario);
    Ok(model.ml_estimate(&model.counts(u)))
}

/// Generalized likelihood ratio statistic.
pub fn glrt_stat(u: &ObservationMatrix, scenario: &DetectionScenario) -> Result<f64> {
    u.check_shape(&scenario.field)?;
    let model = LikelihoodModel::new(scenario);
    Ok(model.glrt(&model.counts(u)))
}

/// Score at zero amplitude.
pub fn score_at_zero(u: &ObservationMatrix, scenario: &DetectionScenario) -> Result<f64> {
    u.check_shape(&scenario.field)?;
    let model = LikelihoodModel::new(scenario);
    Ok(model.score(&model.counts(u)))
}

/// Rao score statistic; needs no amplitude estimate.
pub fn rao_stat(u: &ObservationMatrix, scenario: &DetectionScenario) -> Result<f64> {
    u.check_shape(&scenario.field)?;
    scenario.channel.require_informative()?;
    let model = LikelihoodModel::new(scenario);
    model.rao(&model.counts(u))
}

/// Fisher information about the amplitude at `theta`.
pub fn fisher_info(scenario: &DetectionScenario, theta: f64) -> Result<f64> {
    scenario.channel.require_informative()?;
    if !theta.is_finite() {
        return Err(domain("theta must be finite"));
    }
    let gain = scenario.channel.gain();
    let field = &scenario.field;
    let mut total = 0.0;
    for idx in 0..field.len() {
        let h = field.h[idx];
        let f = scenario.noise.pdf(h * theta - field.tau[idx]);
        let (p, pc) = scenario.prob_pair(idx, theta);
        if f > 0.0 {
            total += h * h * f * f / (p * pc);
        }
    }
    Ok(gain * gain * total)
}

/// Fisher information at zero built from the objective `G` at `−τ`.
pub fn fisher_info_zero_via_objective(scenario: &DetectionScenario) -> Result<f64> {
    let gain = scenario.channel.gain();
    let field = &scenario.field;
    let mut total = 0.0;
    for (&h, &tau) in field.h.iter().zip(&field.tau) {
        total += h * h * eval_g(-tau, &scenario.channel, &scenario.noise)?;
    }
    Ok(gain * gain * total)
}

/// `θ² I(0)`, the noncentrality of both statistics under the alternative.
pub fn noncentrality(scenario: &DetectionScenario) -> Result<f64> {
    Ok(scenario.theta * scenario.theta * fisher_info(scenario, 0.0)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn scenario(field: SensorField, theta: f64, beta: f64, q0: f64, q1: f64) -> DetectionScenario {
        DetectionScenario::new(
            field,
            theta,
            1.0,
            GgnParams::new(1.0, beta).unwrap(),
            ChannelParams::new_lenient(q0, q1).unwrap(),
        )
        .unwrap()
    }

    fn column(n: usize, tau: f64) -> SensorField {
        SensorField::homogeneous(n, 1, 1.0, tau).unwrap()
    }

    fn obs(bits: &[u8]) -> ObservationMatrix {
        ObservationMatrix::new(bits.len(), 1, bits.to_vec()).unwrap()
    }

    fn mixed_field() -> SensorField {
        SensorField::new(
            3,
            2,
            vec![1.0, -0.5, 0.8, 2.0, 0.0, -1.3],
            vec![0.2, -0.4, 0.0, 0.7, 0.1, -0.9],
        )
        .unwrap()
    }

    #[test]
    fn validation() {
        assert!(SensorField::new(0, 1, vec![], vec![]).is_err());
        assert!(SensorField::new(2, 1, vec![1.0], vec![0.0, 0.0]).is_err());
        let noise = GgnParams::new(1.0, 2.0).unwrap();
        assert!(
            DetectionScenario::new(column(1, 0.0), 2.0, 1.0, noise, ChannelParams::ideal())
                .is_err()
        );
        assert!(
            DetectionScenario::new(column(1, 0.0), 0.0, 0.0, noise, ChannelParams::ideal())
                .is_err()
        );
        assert!(ObservationMatrix::new(1, 1, vec![2]).is_err());
        let s = scenario(column(2, 0.0), 0.0, 2.0, 0.0, 0.0);
        assert!(log_likelihood(&obs(&[1]), &s, 0.0).is_err());
        assert!(log_likelihood(&obs(&[1, 0]), &s, 1.5).is_err());
        assert!(success_prob(&s, 2, 0, 0.0).is_err());
    }

    #[test]
    fn forced_channel_sends_ones() {
        let s = scenario(column(500, 0.0), 0.5, 2.0, 1.0, 0.0);
        for hyp in [Hypothesis::H0, Hypothesis::H1] {
            assert_eq!(generate(&s, hyp, 3).ones(), 500);
        }
    }

    #[test]
    fn generated_bit_rates() {
        for (q0, expected) in [(0.0, 0.5f64), (0.7, 0.85)] {
            let s = scenario(column(2000, 0.0), 0.0, 2.0, q0, 0.0);
            let mean = generate(&s, Hypothesis::H0, 11).ones() as f64 / 2000.0;
            let sigma = (expected * (1.0 - expected) / 2000.0).sqrt();
            assert!((mean - expected).abs() < 4.0 * sigma, "q0 = {q0}: {mean}");
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let s = scenario(mixed_field(), 0.3, 2.779, 0.3, 0.1);
        assert_eq!(
            generate(&s, Hypothesis::H1, 9),
            generate(&s, Hypothesis::H1, 9)
        );
    }

    #[test]
    fn success_prob_values() {
        let p = |q0, q1| {
            success_prob(&scenario(column(1, 0.0), 0.0, 2.0, q0, q1), 0, 0, 0.0)
                .unwrap()
                .value()
        };
        assert_eq!(p(0.0, 0.0), 0.5);
        assert!((p(0.7, 0.0) - 0.85).abs() < 1e-15);
        let flat = scenario(column(1, 0.3), 0.0, 2.0, 0.5, 0.5);
        for theta in [-1.0, 0.0, 0.4] {
            assert_eq!(success_prob(&flat, 0, 0, theta).unwrap().value(), 0.5);
        }
    }

    #[test]
    fn success_prob_between_channel_limits() {
        let s = scenario(mixed_field(), 0.0, 1.5, 0.3, 0.1);
        for i in 0..3 {
            for j in 0..2 {
                let p = success_prob(&s, i, j, 0.6).unwrap().value();
                assert!(p > 0.3 && p < 0.9);
            }
        }
    }

    #[test]
    fn log_likelihood_values() {
        let s1 = scenario(column(1, 0.0), 0.0, 2.0, 0.0, 0.0);
        assert!((log_likelihood(&obs(&[1]), &s1, 0.0).unwrap() - 0.5f64.ln()).abs() < 1e-15);
        let s2 = scenario(column(2, 0.0), 0.0, 2.0, 0.7, 0.0);
        let l = log_likelihood(&obs(&[1, 0]), &s2, 0.0).unwrap();
        assert!((l - (0.85f64.ln() + 0.15f64.ln())).abs() < 1e-12);
        assert!((l + 2.0597).abs() < 1e-4);
    }

    #[test]
    fn log_likelihood_contradiction_is_neg_infinity() {
        let s = scenario(column(2, 0.0), 0.0, 2.0, 1.0, 0.0);
        assert_eq!(
            log_likelihood(&obs(&[1, 0]), &s, 0.0).unwrap(),
            f64::NEG_INFINITY
        );
        assert_eq!(log_likelihood(&obs(&[1, 1]), &s, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn log_likelihood_matches_entrywise_loop() {
        let s = scenario(mixed_field(), 0.0, 2.779, 0.3, 0.1);
        let u = ObservationMatrix::new(3, 2, vec![1, 0, 0, 1, 1, 0]).unwrap();
        let noise = GgnParams::new(1.0, 2.779).unwrap();
        for theta in [-0.7, 0.0, 0.25, 1.0] {
            let mut naive = 0.0;
            for i in 0..3 {
                for j in 0..2 {
                    let x = s.field.h(i, j) * theta - s.field.tau(i, j);
                    let p = 0.3 + 0.6 * noise.cdf(x);
                    naive += if u.get(i, j) == 1 {
                        p.ln()
                    } else {
                        (1.0 - p).ln()
                    };
                }
            }
            let got = log_likelihood(&u, &s, theta).unwrap();
            assert!((got - naive).abs() < 1e-12, "{got} vs {naive}");
            let model = LikelihoodModel::new(&s);
            assert!((model.log_likelihood(&model.counts(&u), theta) - naive).abs() < 1e-12);
        }
    }

    #[test]
    fn grouping_merges_identical_entries() {
        let field =
            SensorField::new(2, 2, vec![1.0, 1.0, 2.0, 1.0], vec![0.0, 0.0, 0.0, 0.5]).unwrap();
        let model = LikelihoodModel::new(&scenario(field, 0.0, 2.0, 0.0, 0.0));
        assert_eq!(model.group_count(), 3);
        assert_eq!(model.grid().len(), ML_GRID_POINTS);
        assert_eq!(model.grid()[ML_GRID_POINTS / 2], 0.0);
    }

    #[test]
    fn ml_symmetric_pair_is_zero() {
        let s = scenario(column(2, 0.0), 0.0, 2.0, 0.0, 0.0);
        let ml = ml_estimate(&obs(&[1, 0]), &s).unwrap();
        assert!(ml.theta_hat.abs() < 1e-6, "{}", ml.theta_hat);
        assert!(!ml.at_boundary);
        assert!(glrt_stat(&obs(&[1, 0]), &s).unwrap().abs() < 1e-12);
    }

    #[test]
    fn ml_monotone_likelihood_hits_boundary() {
        let s = scenario(column(1, 0.0), 0.0, 2.0, 0.0, 0.0);
        let ml = ml_estimate(&obs(&[1]), &s).unwrap();
        assert_eq!(ml.theta_hat, 1.0);
        assert!(ml.at_boundary);
        // ln F(1) − ln F(0) with F(1) = (1 + erf 1)/2
        let t = glrt_stat(&obs(&[1]), &s).unwrap();
        assert!(
            (t - (0.921_350_396_474_857_4f64 / 0.5).ln()).abs() < 1e-10,
            "{t}"
        );
        assert!((t - 0.6112).abs() < 1e-4);
    }

    #[test]
    fn ml_matches_dense_grid_search() {
        let field =
            SensorField::from_fn(6, 5, -0.2, |i, j| (0.9 * i as f64 - 1.3 * j as f64).sin())
                .unwrap();
        for (beta, seed) in [(1.5, 1), (2.779, 2), (8.0, 3)] {
            let s = scenario(field.clone(), 0.4, beta, 0.3, 0.05);
            let u = generate(&s, Hypothesis::H1, seed);
            let ml = ml_estimate(&u, &s).unwrap();
            // oracle: 10^5-point scan of the entrywise likelihood
            let n = 100_000;
            let (mut best_t, mut best_l) = (0.0, f64::NEG_INFINITY);
            for m in 0..=n {
                let t = -1.0 + 2.0 * m as f64 / n as f64;
                let l = log_likelihood(&u, &s, t).unwrap();
                if l > best_l {
                    best_t = t;
                    best_l = l;
                }
            }
            assert!(
                (ml.theta_hat - best_t).abs() <= 1e-4,
                "β = {beta}: {} vs {best_t}",
                ml.theta_hat
            );
            assert!(ml.log_likelihood >= best_l - 1e-9);
        }
    }

    #[test]
    fn glrt_is_nonnegative() {
        let s = scenario(mixed_field(), 0.2, 2.0, 0.2, 0.1);
        for seed in 0..50 {
            let u = generate(&s, Hypothesis::H0, seed);
            assert!(glrt_stat(&u, &s).unwrap() >= 0.0);
        }
    }

    #[test]
    fn glrt_invariant_under_amplitude_rescaling() {
        let base = scenario(mixed_field(), 0.3, 2.779, 0.3, 0.0);
        let scaled_h: Vec<f64> = base.field.h_values().iter().map(|h| 2.0 * h).collect();
        let field = SensorField::new(3, 2, scaled_h, base.field.tau_values().to_vec()).unwrap();
        let scaled = DetectionScenario::new(field, 0.15, 0.5, base.noise, base.channel).unwrap();
        for seed in 0..20 {
            let u = generate(&base, Hypothesis::H1, seed);
            assert_eq!(u, generate(&scaled, Hypothesis::H1, seed));
            let (a, b) = (
                glrt_stat(&u, &base).unwrap(),
                glrt_stat(&u, &scaled).unwrap(),
            );
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn rao_single_bit() {
        let s = scenario(column(1, 0.0), 0.0, 2.0, 0.0, 0.0);
        for bit in [1, 0] {
            let t = rao_stat(&obs(&[bit]), &s).unwrap();
            assert!((t - 1.0).abs() < 1e-12, "{t}");
        }
        let score = score_at_zero(&obs(&[1]), &s).unwrap();
        assert!((score - 2.0 / PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rao_rejects_uninformative_channel() {
        let s = scenario(column(3, 0.0), 0.0, 2.0, 0.4, 0.6);
        assert!(rao_stat(&obs(&[1, 0, 1]), &s).is_err());
        assert!(fisher_info(&s, 0.0).is_err());
        let flat = scenario(
            SensorField::homogeneous(3, 1, 0.0, 0.0).unwrap(),
            0.0,
            2.0,
            0.1,
            0.0,
        );
        assert!(rao_stat(&obs(&[1, 0, 1]), &flat).is_err());
    }

    #[test]
    fn score_has_zero_mean_under_null() {
        let n = 100_000;
        let field = SensorField::from_fn(n, 1, -0.3, |i, _| 0.5 + (i % 7) as f64 * 0.25).unwrap();
        let s = scenario(field, 0.0, 2.779, 0.3, 0.0);
        let u = generate(&s, Hypothesis::H0, 21);
        let score = score_at_zero(&u, &s).unwrap();
        // mean per-entry score within 4 standard errors of zero
        let info = fisher_info(&s, 0.0).unwrap();
        assert!(score.abs() < 4.0 * info.sqrt(), "{score}");
    }

    #[test]
    fn fisher_info_values() {
        let one = scenario(column(1, 0.0), 0.0, 2.0, 0.0, 0.0);
        assert!((fisher_info(&one, 0.0).unwrap() - 4.0 / PI).abs() < 1e-12);
        let s = scenario(column(2000, 0.0), 0.0, 2.0, 0.7, 0.0);
        let g0 = eval_g(0.0, &s.channel, &s.noise).unwrap();
        let expected = 2000.0 * 0.09 * g0;
        assert!((fisher_info(&s, 0.0).unwrap() - expected).abs() < 1e-9 * expected);
    }

    #[test]
    fn fisher_info_two_routes() {
        for (beta, q0, q1) in [
            (1.5, 0.3, 0.1),
            (2.779, 0.7, 0.0),
            (8.0, 0.1, 0.4),
            (0.7, 0.9, 0.3),
        ] {
            let s = scenario(mixed_field(), 0.0, beta, q0, q1);
            let direct = fisher_info(&s, 0.0).unwrap();
            let via_g = fisher_info_zero_via_objective(&s).unwrap();
            assert!(
                (direct - via_g).abs() < 1e-10,
                "β = {beta}: {direct} vs {via_g}"
            );
            let model = LikelihoodModel::new(&s);
            assert!((model.info_zero() - direct).abs() < 1e-10);
        }
    }

    #[test]
    fn score_variance_matches_fisher_info() {
        let s = scenario(mixed_field(), 0.0, 2.779, 0.3, 0.0);
        let model = LikelihoodModel::new(&s);
        let draws = 100_000;
        let mut rng = rng::stream(5, 0);
        let mut bits = vec![0u8; s.field.len()];
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        for _ in 0..draws {
            generate_into(&s, Hypothesis::H0, &mut rng, &mut bits);
            let score = model.score(&model.counts_from_bits(&bits));
            sum += score;
            sum_sq += score * score;
        }
        let mean = sum / draws as f64;
        let var = sum_sq / draws as f64 - mean * mean;
        let info = fisher_info(&s, 0.0).unwrap();
        assert!((var / info - 1.0).abs() < 0.05, "{var} vs {info}");
    }

    #[test]
    fn fisher_info_matches_expected_curvature() {
        let theta = 0.3;
        let s = scenario(mixed_field(), theta, 2.0, 0.2, 0.05);
        let model = LikelihoodModel::new(&s);
        let draws = 100_000;
        let step = 1e-3;
        let mut rng = rng::stream(6, 0);
        let mut bits = vec![0u8; s.field.len()];
        let mut curvature = 0.0;
        for _ in 0..draws {
            generate_into(&s, Hypothesis::H1, &mut rng, &mut bits);
            let c = model.counts_from_bits(&bits);
            let (lm, l0, lp) = (
                model.log_likelihood(&c, theta - step),
                model.log_likelihood(&c, theta),
                model.log_likelihood(&c, theta + step),
            );
            curvature += (lp - 2.0 * l0 + lm) / (step * step);
        }
        let observed = -curvature / draws as f64;
        let info = fisher_info(&s, theta).unwrap();
        assert!((observed / info - 1.0).abs() < 0.05, "{observed} vs {info}");
    }

    #[test]
    fn noncentrality_scales_with_theta_squared() {
        let s = scenario(mixed_field(), 0.2, 2.0, 0.3, 0.0);
        let lambda = noncentrality(&s).unwrap();
        assert!((lambda - 0.04 * fisher_info(&s, 0.0).unwrap()).abs() < 1e-14);
    }
}
