//! Error type shared by every module in the crate.

use thiserror::Error;

/// Crate-wide error type.
///
/// The three variants map onto the CLI exit-code contract: `Domain` is a
/// usage error (exit 2); `Budget` and `Overflow` are resource errors
/// (exit 3).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The input is outside the operation's domain (zero where positives are
    /// required, a non-prime modulus, an empty tuple, ...).
    #[error("invalid input: {0}")]
    Domain(String),

    /// A configured resource budget would be exceeded (range too wide,
    /// too many divisors or subsets, counting past the configured maximum).
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// Exact integer or rational arithmetic would overflow its fixed width.
    #[error("overflow: {0}")]
    Overflow(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn budget(msg: impl Into<String>) -> Self {
        Error::Budget(msg.into())
    }

    pub fn overflow(msg: impl Into<String>) -> Self {
        Error::Overflow(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
