//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the library.
///
/// Inapplicability of a Markov move is *not* an error (it is a normal outcome
/// of a fiber-walk proposal); [`crate::moves::apply`] returns `Option` instead.
#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument was violated.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Two objects that must agree on the node count (or on shapes) do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The request exceeds a configured capacity guard.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// An operation only defined for some reciprocation variants was called
    /// with another.
    #[error("invalid variant: {0}")]
    InvalidVariant(String),

    /// A move degenerated to zero after cancellation.
    #[error("move cancels to zero")]
    EmptyMove,

    /// The statistic is not in the marginal cone (no nonnegative preimage).
    #[error("statistic is not in the marginal cone")]
    InfeasibleStatistic,

    /// An iterative fit did not reach the moment-equation tolerance.
    #[error("no convergence after {iterations} iterations (moment residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    /// Text input could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),

    /// Underlying I/O failure.
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid_arg(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
