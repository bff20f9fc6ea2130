use thiserror::Error;

/// Error type shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// Two blocks (or a block and an operation) disagree about the base.
    #[error("base mismatch: {0} vs {1}")]
    BaseMismatch(u32, u32),

    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Predicate source text failed to parse.
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    /// Predicate evaluation hit a runtime fault (e.g. `%` by zero).
    #[error("predicate evaluation error: {0}")]
    Eval(String),

    /// A resource budget was exhausted before the request completed.
    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// An internal invariant that the construction guarantees was violated.
    /// Reaching this is always a bug, never a user error.
    #[error("internal assertion failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}
