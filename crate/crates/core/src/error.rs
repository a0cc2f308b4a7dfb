use thiserror::Error;

/// Errors raised by the threshold design and detection toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// `q0 + q1 = 1`: every received bit is independent of the sensor bit,
    /// so the Fisher information vanishes identically.
    #[error("uninformative channel: q0 + q1 = 1 (q0 = {q0}, q1 = {q1})")]
    UninformativeChannel { q0: f64, q1: f64 },

    /// Gradient ascent hit its iteration cap.
    #[error("gradient ascent did not converge after {iterations} iterations (last x = {last_x}, |G'| = {last_grad:e})")]
    NonConvergence {
        iterations: usize,
        last_x: f64,
        last_grad: f64,
        trace: Vec<(f64, f64)>,
    },

    /// The backtracking line search could no longer make progress.
    #[error("line search stalled at x = {x} with |G'| = {grad:e}")]
    LineSearchStalled { x: f64, grad: f64 },

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
