use thiserror::Error;

/// Errors produced by the solver pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// The requested result cannot be decided at the current working
    /// precision. Callers retry at doubled precision up to a ceiling.
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    /// Invalid input to a constructor or operation.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A bracketing root finder was called without a sign change.
    #[error("no sign change on [{a}, {b}]")]
    NoSignChange { a: String, b: String },

    /// The Baker-Davenport reduction could not find a usable approximation
    /// denominator within the allowed range of T.
    #[error("reduction stalled: {0}")]
    ReductionStalled(String),

    /// A consistency check on precomputed data failed; the pipeline must
    /// not proceed on corrupted inputs.
    #[error("validation failed: {0}")]
    ValidationFailed(String),

    /// Checkpoint file problems (wrong magic, version, or corruption).
    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn is_retryable(&self) -> bool {
        matches!(self, Error::PrecisionExhausted(_))
    }
}

/// Retry `f` at doubled precision until it succeeds, starting from
/// `bits` and giving up above `ceiling` (default 2^16).
pub fn with_precision_retry<T>(
    bits: u32,
    ceiling: u32,
    mut f: impl FnMut(u32) -> Result<T>,
) -> Result<T> {
    let mut b = bits.max(64);
    loop {
        match f(b) {
            Err(e) if e.is_retryable() && b < ceiling => b = (b * 2).min(ceiling),
            other => return other,
        }
    }
}

pub const PRECISION_CEILING: u32 = 1 << 16;
