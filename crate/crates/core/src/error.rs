use thiserror::Error;

/// Errors surfaced by the estimation, bound and verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate design: {0}")]
    DegenerateDesign(String),

    #[error("reduction infeasible: {0}")]
    ReductionInfeasible(String),

    #[error("enumeration too large: {states} joint states exceeds the limit of {limit}")]
    TooLarge { states: u128, limit: u64 },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
