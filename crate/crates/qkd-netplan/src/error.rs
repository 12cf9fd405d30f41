//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by model evaluation, planning and file handling.
#[derive(Debug, Error)]
pub enum Error {
    /// A physical or protocol parameter violates its domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A requested computation has no solution in the given domain
    /// (infeasible switch count, empty candidate set, zero-rate link...).
    #[error("{0}")]
    Domain(String),

    /// Network description file could not be parsed or is inconsistent.
    #[error("network file: {0}")]
    NetworkFile(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
