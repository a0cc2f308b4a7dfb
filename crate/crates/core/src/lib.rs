pub mod cli;
pub mod detection;
pub mod error;
pub mod ggn;
pub mod harness;
pub mod objective;
pub mod optimizer;
pub mod rng;
pub mod specfun;

pub use detection::{DetectionScenario, Hypothesis, ObservationMatrix, SensorField};
pub use error::{Error, Result};
pub use ggn::GgnParams;
pub use objective::{CanonicalChannel, ChannelParams};
pub use optimizer::{solve, solve_threshold, SolveCase, ThresholdSolution};
pub use specfun::Probability;
