use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GmlError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("refused: {0}")]
    Budget(String),

    #[error("domain error at theta={theta}: {reason}")]
    Domain { theta: f64, reason: String },

    #[error("degenerate snap: {0}")]
    Degeneracy(String),

    #[error("closure error: {0}")]
    Closure(String),

    #[error("internal consistency error: {0}")]
    Internal(String),

    #[error("i/o error on {path}: {reason}")]
    Io { path: String, reason: String },
}

pub type Result<T> = std::result::Result<T, GmlError>;

pub(crate) fn invalid(msg: impl Into<String>) -> GmlError {
    GmlError::InvalidArgument(msg.into())
}
