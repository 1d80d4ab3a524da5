//! Error type shared across the library.

use thiserror::Error;

/// Errors surfaced by library operations.
///
/// Numerical routines are total wherever possible; errors are reserved for
/// contract violations (bad parameters, exhausted inputs, size blow-ups).
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violated a documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An input collection was empty where at least one element is required.
    #[error("empty input: {0}")]
    EmptyInput(String),

    /// A sample stream could not supply the requested number of draws.
    #[error("stream exhausted after {drawn} of {requested} draws")]
    StreamExhausted { drawn: usize, requested: usize },

    /// A derived problem size exceeded a hard desk-scale cap.
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    /// Integer overflow in an exact computation.
    #[error("overflow: {0}")]
    Overflow(String),

    /// Every sample was discarded by truncation; nothing left to fit.
    #[error("all samples discarded by truncation (t = {t})")]
    AllSamplesTruncated { t: f64 },

    /// A consumer drew more samples than its budget allows.
    #[error("sample budget exceeded: budget {budget}")]
    BudgetExceeded { budget: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
