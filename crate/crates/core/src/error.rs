//! Error type shared by every module of the library.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or inconsistent dataset.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A supplied point order is not a permutation compatible with `f`.
    #[error("invalid order: {0}")]
    InvalidOrder(String),
    /// A query line is degenerate or does not have positive slope.
    #[error("invalid line: {0}")]
    InvalidLine(String),
    /// An input that must be sorted was not.
    #[error("unsorted input: {0}")]
    Unsorted(String),
    /// A structural invariant failed; this indicates a bug or corrupt data.
    #[error("invariant violated: {0}")]
    Invariant(String),
    /// A document could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
