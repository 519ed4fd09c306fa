//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised while constructing or evaluating domain objects.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A point lies outside the domain an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),
    /// A constructor was handed data violating a structural invariant.
    #[error("invalid construction: {0}")]
    Invalid(String),
    /// An operation is not available for the given variant.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
    pub fn unsupported(msg: impl Into<String>) -> Self {
        Error::Unsupported(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
