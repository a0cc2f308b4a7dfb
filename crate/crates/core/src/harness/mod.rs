//! Experiment drivers: Monte Carlo ROC estimation, named presets and the
//! verification suite.

pub mod presets;
pub mod roc;
pub mod stats;
pub mod verify;

pub use presets::{Preset, PresetSpec, SweepRow, SweepSpec};
pub use roc::{
    asymptotic_roc, binomial_sigma, decile_grid, empirical_roc, simulate, Detector,
    ExperimentConfig, RocCurve, RocKind, RocPoint, ThresholdPolicy, TrialStatistics,
};
pub use verify::{default_sweep, verify_propositions, ModelPoint, VerifyReport, VerifyScope};
