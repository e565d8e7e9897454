use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The explicit integrator produced a non-finite or runaway value.
    #[error("solution diverged at step {step} (t = {time})")]
    Divergence { step: usize, time: f64 },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("unsupported preset: {0}")]
    UnsupportedPreset(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
