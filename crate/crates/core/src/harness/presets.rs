//! Named experiment configurations.

use std::fmt;
use std::str::FromStr;

use crate::detection::{DetectionScenario, SensorField};
use crate::error::{Error, Result};
use crate::ggn::GgnParams;
use crate::harness::roc::{Detector, ExperimentConfig, ThresholdPolicy};
use crate::objective::ChannelParams;
use crate::optimizer::{solve_threshold, SolveCase};

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Optimal thresholds for `(q0, q1) = (0.7, 0)` at four shapes.
    Table1,
    /// Normalized optimal threshold against shape for several channels.
    Fig1Sweep,
    /// Homogeneous 2000-sensor experiment with a lossy asymmetric channel.
    Fig2Roc,
    /// Acoustic plane wave on a 50 × 50 sensor/time grid.
    Fig3Acoustic,
}

impl Preset {
    pub const ALL: [Preset; 4] = [
        Preset::Table1,
        Preset::Fig1Sweep,
        Preset::Fig2Roc,
        Preset::Fig3Acoustic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Table1 => "table1",
            Preset::Fig1Sweep => "fig1-sweep",
            Preset::Fig2Roc => "fig2-roc",
            Preset::Fig3Acoustic => "fig3-acoustic",
        }
    }

    pub fn spec(self) -> PresetSpec {
        match self {
            Preset::Table1 => PresetSpec::Sweep(table1()),
            Preset::Fig1Sweep => PresetSpec::Sweep(fig1_sweep()),
            Preset::Fig2Roc => PresetSpec::Experiment(fig2_roc(8.0).expect("valid preset")),
            Preset::Fig3Acoustic => PresetSpec::Experiment(fig3_acoustic().expect("valid preset")),
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s.trim())
            .ok_or_else(|| Error::UnknownPreset(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PresetSpec {
    Sweep(SweepSpec),
    Experiment(ExperimentConfig),
}

/// Threshold solves over every `(channel, β)` pair at a fixed scale.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub alpha: f64,
    pub channels: Vec<(f64, f64)>,
    pub betas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub q0: f64,
    pub q1: f64,
    pub beta: f64,
    /// `α x*`, or the error message for rows that failed.
    pub alpha_x_star: std::result::Result<f64, String>,
    pub case: Option<SolveCase>,
}

impl SweepSpec {
    pub fn run(&self) -> Vec<SweepRow> {
        let mut rows = Vec::with_capacity(self.channels.len() * self.betas.len());
        for &(q0, q1) in &self.channels {
            for &beta in &self.betas {
                let solved = GgnParams::new(self.alpha, beta)
                    .and_then(|noise| Ok((noise, ChannelParams::new(q0, q1)?)))
                    .and_then(|(noise, ch)| solve_threshold(&noise, &ch));
                rows.push(match solved {
                    Ok(s) => SweepRow {
                        q0,
                        q1,
                        beta,
                        alpha_x_star: Ok(self.alpha * s.x_star),
                        case: Some(s.case),
                    },
                    Err(e) => SweepRow {
                        q0,
                        q1,
                        beta,
                        alpha_x_star: Err(e.to_string()),
                        case: None,
                    },
                });
            }
        }
        rows
    }
}

pub fn table1() -> SweepSpec {
    SweepSpec {
        alpha: 1.0,
        channels: vec![(0.7, 0.0)],
        betas: vec![1.5, 2.0, 4.0, 8.0],
    }
}

/// `β = 0.2, 0.4, ..., 8`.
pub fn fig1_betas() -> Vec<f64> {
    (1..=40).map(|i| i as f64 / 5.0).collect()
}

pub fn fig1_sweep() -> SweepSpec {
    SweepSpec {
        alpha: 1.0,
        channels: vec![(0.7, 0.0), (0.3, 0.0), (0.2, 0.2), (0.0, 0.0)],
        betas: fig1_betas(),
    }
}

/// 2000 sensors, one snapshot each, `h ≡ 1`, `θ = 0.0661`, `(q0, q1) = (0.7, 0)`.
pub fn fig2_roc(beta: f64) -> Result<ExperimentConfig> {
    let field = SensorField::homogeneous(2000, 1, 1.0, 0.0)?;
    Ok(ExperimentConfig {
        scenario: DetectionScenario::new(
            field,
            0.0661,
            1.0,
            GgnParams::new(1.0, beta)?,
            ChannelParams::new(0.7, 0.0)?,
        )?,
        trials: 2000,
        detectors: vec![Detector::Glrt, Detector::Rao],
        policies: vec![ThresholdPolicy::Optimal, ThresholdPolicy::Zero],
        master_seed: DEFAULT_SEED,
    })
}

/// Wave response `sin(1.676 i − 2.514 j)` with sensors `i` and samples `j`
/// both counted from one.
pub fn acoustic_field(n: usize, k: usize) -> Result<SensorField> {
    SensorField::from_fn(n, k, 0.0, |i, j| {
        (1.676 * (i + 1) as f64 - 2.514 * (j + 1) as f64).sin()
    })
}

/// 50 × 50 acoustic field in shape-2.779 noise, `θ = 0.05`, `(q0, q1) = (0.3, 0)`.
pub fn fig3_acoustic() -> Result<ExperimentConfig> {
    Ok(ExperimentConfig {
        scenario: DetectionScenario::new(
            acoustic_field(50, 50)?,
            0.05,
            1.0,
            GgnParams::new(1.0, 2.779)?,
            ChannelParams::new(0.3, 0.0)?,
        )?,
        trials: 1000,
        detectors: vec![Detector::Glrt, Detector::Rao],
        policies: vec![ThresholdPolicy::Optimal, ThresholdPolicy::Zero],
        master_seed: DEFAULT_SEED,
    })
}
