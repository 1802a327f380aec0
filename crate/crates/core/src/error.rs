use thiserror::Error;

/// Errors raised by the numerical and physics layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("adaptive integrator exhausted {steps} steps at t = {t:.6e} (error estimate {error_estimate:.3e})")]
    StepExhaustion {
        steps: usize,
        t: f64,
        error_estimate: f64,
    },

    #[error("degenerate fit input: {0}")]
    DegenerateFit(String),

    #[error("numerical domain error: {0}")]
    NumericalDomain(String),

    #[error("mode at k = {k:.12e} failed: {source}")]
    ModeFailure {
        k: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("small-k regime mismatch: expected {expected} (residual {expected_residual:.3e}) but {other} fits better (residual {other_residual:.3e})")]
    RegimeMismatch {
        expected: &'static str,
        expected_residual: f64,
        other: &'static str,
        other_residual: f64,
    },

    #[error("table does not match the request: {0}")]
    TableMismatch(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
