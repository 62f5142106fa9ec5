use std::fmt;

use num_traits::Float;

/// Errors surfaced by the distribution, the reference oracles and the
/// benchmark drivers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// The key is already present in the distribution.
    DuplicateKey,
    /// The key is not present in the distribution.
    KeyNotFound,
    /// Weights must be strictly positive and finite.
    InvalidWeight,
    /// The operation needs at least one category or weight.
    Empty,
    /// The sample point lies outside `[0, total_weight)`.
    OutOfRange,
    /// A benchmark configuration failed validation.
    InvalidConfig(String),
    /// An internal invariant was violated; this indicates a bug.
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DuplicateKey => write!(f, "duplicate key"),
            Error::KeyNotFound => write!(f, "key not found"),
            Error::InvalidWeight => write!(f, "weight must be positive and finite"),
            Error::Empty => write!(f, "empty distribution"),
            Error::OutOfRange => write!(f, "sample point out of range"),
            Error::InvalidConfig(msg) => write!(f, "invalid configuration: {msg}"),
            Error::Internal(msg) => write!(f, "internal invariant violated: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

/// Weights are rejected at every API boundary unless strictly positive and
/// finite; zero-weight categories would be unsampleable and negative or
/// non-finite values break the interval semantics of sampling.
pub(crate) fn check_weight<W: Float>(w: W) -> Result<()> {
    if w.is_finite() && w > W::zero() {
        Ok(())
    } else {
        Err(Error::InvalidWeight)
    }
}
