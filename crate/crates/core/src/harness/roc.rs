//! Monte Carlo and asymptotic receiver operating characteristics.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::detection::{generate_into, DetectionScenario, Hypothesis, LikelihoodModel};
use crate::error::{domain, Error, Result};
use crate::optimizer::solve_threshold;
use crate::rng;
use crate::specfun::{chisq1_quantile, ncx2_1_sf};

/// Environment variable holding the worker count for trial simulation.
pub const THREADS_ENV: &str = "ONEBIT_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Detector {
    Glrt,
    Rao,
}

impl Detector {
    pub fn label(self) -> &'static str {
        match self {
            Detector::Glrt => "glrt",
            Detector::Rao => "rao",
        }
    }
}

impl fmt::Display for Detector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Detector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "glrt" => Ok(Detector::Glrt),
            "rao" => Ok(Detector::Rao),
            other => Err(Error::Config(format!("unknown detector `{other}`"))),
        }
    }
}

/// How the common quantizer threshold is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdPolicy {
    /// The maximizer of the noncentrality for the scenario's noise and channel.
    Optimal,
    Zero,
    Fixed(f64),
}

impl ThresholdPolicy {
    pub fn label(&self) -> String {
        match self {
            ThresholdPolicy::Optimal => "optimal".into(),
            ThresholdPolicy::Zero => "zero".into(),
            ThresholdPolicy::Fixed(tau) => format!("fixed:{tau}"),
        }
    }

    pub fn resolve(&self, scenario: &DetectionScenario) -> Result<f64> {
        match *self {
            ThresholdPolicy::Optimal => {
                Ok(solve_threshold(&scenario.noise, &scenario.channel)?.tau_star)
            }
            ThresholdPolicy::Zero => Ok(0.0),
            ThresholdPolicy::Fixed(tau) if tau.is_finite() => Ok(tau),
            ThresholdPolicy::Fixed(tau) => {
                Err(domain(format!("threshold must be finite, got {tau}")))
            }
        }
    }
}

impl fmt::Display for ThresholdPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for ThresholdPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.to_ascii_lowercase().as_str() {
            "optimal" => return Ok(ThresholdPolicy::Optimal),
            "zero" => return Ok(ThresholdPolicy::Zero),
            _ => {}
        }
        let value = s.strip_prefix("fixed:").unwrap_or(s);
        value
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(ThresholdPolicy::Fixed)
            .ok_or_else(|| Error::Config(format!("unknown threshold policy `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// The field's own thresholds are replaced according to each policy.
    pub scenario: DetectionScenario,
    pub trials: usize,
    pub detectors: Vec<Detector>,
    pub policies: Vec<ThresholdPolicy>,
    pub master_seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.detectors.is_empty() {
            return Err(Error::Config("at least one detector is required".into()));
        }
        if self.policies.is_empty() {
            return Err(Error::Config(
                "at least one threshold policy is required".into(),
            ));
        }
        Ok(())
    }
}

/// Simulated statistics of one detector under one threshold policy.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialStatistics {
    pub detector: Detector,
    pub policy: ThresholdPolicy,
    pub tau: f64,
    /// Indexed by trial.
    pub null: Vec<f64>,
    pub alternative: Vec<f64>,
}

fn worker_count() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0)
}

/// Runs every trial under both hypotheses for each threshold policy.
///
/// Trial `t` under hypothesis `H` draws from the stream keyed by
/// `(master_seed, t, H)` whatever the policy, so policies are compared on
/// common noise and channel draws.
pub fn simulate(config: &ExperimentConfig) -> Result<Vec<TrialStatistics>> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(worker_count())
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;

    let mut out = Vec::new();
    for policy in &config.policies {
        let tau = policy.resolve(&config.scenario)?;
        let scenario = DetectionScenario {
            field: config.scenario.field.with_threshold(tau)?,
            ..config.scenario.clone()
        };
        let model = LikelihoodModel::new(&scenario);
        if config.detectors.contains(&Detector::Rao) && model.info_zero() <= 0.0 {
            return Err(domain(
                "Rao statistic needs positive Fisher information at zero",
            ));
        }

        let per_trial: Vec<[Vec<f64>; 2]> = pool.install(|| {
            (0..config.trials as u64)
                .into_par_iter()
                .map_init(
                    || vec![0u8; scenario.field.len()],
                    |bits, trial| {
                        [Hypothesis::H0, Hypothesis::H1].map(|hyp| {
                            let seed =
                                rng::trial_seed(config.master_seed, trial, hyp.is_alternative());
                            let mut stream = rng::stream(seed, 0);
                            generate_into(&scenario, hyp, &mut stream, bits);
                            let counts = model.counts_from_bits(bits);
                            config
                                .detectors
                                .iter()
                                .map(|d| match d {
                                    Detector::Glrt => model.glrt(&counts),
                                    Detector::Rao => {
                                        let s = model.score(&counts);
                                        s * s / model.info_zero()
                                    }
                                })
                                .collect()
                        })
                    },
                )
                .collect()
        });

        for (di, &detector) in config.detectors.iter().enumerate() {
            out.push(TrialStatistics {
                detector,
                policy: *policy,
                tau,
                null: per_trial.iter().map(|t| t[0][di]).collect(),
                alternative: per_trial.iter().map(|t| t[1][di]).collect(),
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RocKind {
    Empirical,
    Asymptotic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocPoint {
    pub pfa: f64,
    pub pd: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RocCurve {
    /// Nondecreasing in `pfa`, starting at `(0, 0)` and ending at `(1, 1)`
    /// for empirical curves.
    pub points: Vec<RocPoint>,
    pub kind: RocKind,
    pub detector: String,
    pub threshold_label: String,
    pub tau: Option<f64>,
}

impl RocCurve {
    /// Detection probability at `pfa`, interpolating linearly between points.
    pub fn pd_at(&self, pfa: f64) -> f64 {
        let pts = &self.points;
        let Some(first) = pts.first() else {
            return f64::NAN;
        };
        if pfa <= first.pfa {
            return first.pd;
        }
        // first index with pfa strictly above the query
        let hi = pts.partition_point(|p| p.pfa <= pfa);
        if hi == pts.len() {
            return pts[hi - 1].pd;
        }
        let (a, b) = (pts[hi - 1], pts[hi]);
        a.pd + (b.pd - a.pd) * (pfa - a.pfa) / (b.pfa - a.pfa)
    }
}

/// ROC from matched statistics: reject when `T ≥ γ`, with `γ` swept over
/// every distinct null value.
pub fn roc_from_statistics(null: &[f64], alternative: &[f64]) -> Vec<RocPoint> {
    let mut null: Vec<f64> = null.to_vec();
    let mut alt: Vec<f64> = alternative.to_vec();
    null.sort_by(|a, b| b.total_cmp(a));
    alt.sort_by(|a, b| b.total_cmp(a));
    let (n0, n1) = (null.len() as f64, alt.len() as f64);

    let mut points = vec![RocPoint { pfa: 0.0, pd: 0.0 }];
    let (mut i, mut j) = (0, 0);
    while i < null.len() {
        let gamma = null[i];
        while i < null.len() && null[i] >= gamma {
            i += 1;
        }
        while j < alt.len() && alt[j] >= gamma {
            j += 1;
        }
        points.push(RocPoint {
            pfa: i as f64 / n0,
            pd: j as f64 / n1,
        });
    }
    if points.last().is_some_and(|p| p.pd < 1.0) {
        points.push(RocPoint { pfa: 1.0, pd: 1.0 });
    }
    points
}

pub fn curves_from_statistics(stats: &[TrialStatistics]) -> Vec<RocCurve> {
    stats
        .iter()
        .map(|s| RocCurve {
            points: roc_from_statistics(&s.null, &s.alternative),
            kind: RocKind::Empirical,
            detector: s.detector.label().into(),
            threshold_label: s.policy.label(),
            tau: Some(s.tau),
        })
        .collect()
}

/// One empirical curve per detector and threshold policy.
pub fn empirical_roc(config: &ExperimentConfig) -> Result<Vec<RocCurve>> {
    Ok(curves_from_statistics(&simulate(config)?))
}

/// ROC implied by a central null and a noncentral alternative with
/// noncentrality `lambda`, both chi-squared with one degree of freedom.
pub fn asymptotic_roc(lambda: f64, pfa_grid: &[f64]) -> Result<RocCurve> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(domain(format!(
            "noncentrality must be finite and >= 0, got {lambda}"
        )));
    }
    let mut points = Vec::with_capacity(pfa_grid.len());
    let mut sorted = pfa_grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    for pfa in sorted {
        if !(0.0..=1.0).contains(&pfa) {
            return Err(domain(format!(
                "false-alarm level must lie in [0, 1], got {pfa}"
            )));
        }
        let pd = if pfa == 0.0 || pfa == 1.0 {
            pfa
        } else {
            ncx2_1_sf(chisq1_quantile(1.0 - pfa)?, lambda)
        };
        points.push(RocPoint { pfa, pd });
    }
    Ok(RocCurve {
        points,
        kind: RocKind::Asymptotic,
        detector: "asymptotic".into(),
        threshold_label: format!("lambda:{lambda}"),
        tau: None,
    })
}

/// `0.1, 0.2, ..., 0.9`.
pub fn decile_grid() -> Vec<f64> {
    (1..10).map(|i| i as f64 / 10.0).collect()
}

/// Standard error of an empirical rate `p` over `trials` trials.
pub fn binomial_sigma(p: f64, trials: usize) -> f64 {
    (p * (1.0 - p) / trials as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detection::SensorField;
    use crate::ggn::GgnParams;
    use crate::objective::ChannelParams;

    fn small_config(theta: f64, trials: usize) -> ExperimentConfig {
        let field =
            SensorField::from_fn(20, 3, 0.0, |i, j| (0.7 * i as f64 + 1.1 * j as f64).cos())
                .unwrap();
        ExperimentConfig {
            scenario: DetectionScenario::new(
                field,
                theta,
                1.0,
                GgnParams::new(1.0, 2.5).unwrap(),
                ChannelParams::new(0.3, 0.05).unwrap(),
            )
            .unwrap(),
            trials,
            detectors: vec![Detector::Glrt, Detector::Rao],
            policies: vec![ThresholdPolicy::Optimal, ThresholdPolicy::Zero],
            master_seed: 17,
        }
    }

    #[test]
    fn parses_labels() {
        assert_eq!("GLRT".parse::<Detector>().unwrap(), Detector::Glrt);
        assert!("lrt".parse::<Detector>().is_err());
        assert_eq!(
            "zero".parse::<ThresholdPolicy>().unwrap(),
            ThresholdPolicy::Zero
        );
        assert_eq!(
            "fixed:-0.5".parse::<ThresholdPolicy>().unwrap(),
            ThresholdPolicy::Fixed(-0.5)
        );
        assert_eq!(
            "0.25".parse::<ThresholdPolicy>().unwrap(),
            ThresholdPolicy::Fixed(0.25)
        );
        assert!("best".parse::<ThresholdPolicy>().is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = small_config(0.1, 0);
        assert!(simulate(&c).is_err());
        c.trials = 5;
        c.detectors.clear();
        assert!(simulate(&c).is_err());
    }

    #[test]
    fn sweep_on_hand_example() {
        let pts = roc_from_statistics(&[1.0, 2.0, 2.0, 3.0], &[2.5, 3.5, 0.5, 2.0]);
        let expect = [
            (0.0, 0.0),
            (0.25, 0.25),
            (0.75, 0.75),
            (1.0, 0.75),
            (1.0, 1.0),
        ];
        assert_eq!(pts.len(), expect.len());
        for (p, (pfa, pd)) in pts.iter().zip(expect) {
            assert_eq!((p.pfa, p.pd), (pfa, pd));
        }
    }

    #[test]
    fn pd_interpolation() {
        let curve = RocCurve {
            points: roc_from_statistics(&[1.0, 2.0], &[3.0, 1.5]),
            kind: RocKind::Empirical,
            detector: "glrt".into(),
            threshold_label: "zero".into(),
            tau: Some(0.0),
        };
        // points (0,0) (0.5,0.5) (1,1)
        assert!((curve.pd_at(0.25) - 0.25).abs() < 1e-15);
        assert_eq!(curve.pd_at(1.0), 1.0);
        assert_eq!(curve.pd_at(0.0), 0.0);
    }

    #[test]
    fn asymptotic_curve_limits() {
        let grid = [0.0, 0.05, 0.1, 0.5, 0.9, 1.0];
        let flat = asymptotic_roc(0.0, &grid).unwrap();
        for p in &flat.points {
            assert!((p.pd - p.pfa).abs() < 1e-7, "{p:?}");
        }
        let strong = asymptotic_roc(50.0, &[0.05]).unwrap();
        assert!(strong.points[0].pd > 0.999);
        assert!(asymptotic_roc(-1.0, &grid).is_err());
        assert!(asymptotic_roc(1.0, &[1.5]).is_err());
    }

    #[test]
    fn reproducible_and_independent_of_worker_count() {
        let c = small_config(0.15, 64);
        let a = empirical_roc(&c).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(3)
            .build()
            .unwrap();
        let b = pool.install(|| empirical_roc(&c).unwrap());
        assert_eq!(a, b);
        assert_eq!(a.len(), 4);
        for curve in &a {
            assert!(curve.points.windows(2).all(|w| w[0].pfa <= w[1].pfa));
            assert!(curve.points.iter().all(|p| (0.0..=1.0).contains(&p.pd)));
        }
    }

    #[test]
    fn zero_amplitude_gives_diagonal() {
        let c = small_config(0.0, 1000);
        for curve in empirical_roc(&c).unwrap() {
            for pfa in decile_grid() {
                let pd = curve.pd_at(pfa);
                // both samples carry binomial noise
                let sigma = (2.0 * pfa * (1.0 - pfa) / 1000.0).sqrt();
                assert!(
                    (pd - pfa).abs() < 4.0 * sigma + 0.01,
                    "{} pfa {pfa}: {pd}",
                    curve.detector
                );
            }
        }
    }

    #[test]
    fn policies_share_draws() {
        let mut c = small_config(0.2, 30);
        c.policies = vec![ThresholdPolicy::Zero, ThresholdPolicy::Fixed(0.0)];
        let stats = simulate(&c).unwrap();
        assert_eq!(stats[0].null, stats[2].null);
        assert_eq!(stats[1].alternative, stats[3].alternative);
    }
}
