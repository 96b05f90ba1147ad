use thiserror::Error;

/// Errors raised by the analytic and simulation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("binomial stream of {trials} terms exceeds the term budget of {budget}")]
    TermBudget { trials: u64, budget: u64 },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("search limit reached: no W <= {limit} meets the requirement")]
    SearchLimit { limit: u64 },

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("degenerate: {0}")]
    Degenerate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
