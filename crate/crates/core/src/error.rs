use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    InvalidSize(String),
    #[error("{0} must be a power of two, got {1}")]
    NotPowerOfTwo(&'static str, usize),
    #[error("shape mismatch: expected {expected} samples, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),
    #[error("invalid time plan: {0}")]
    InvalidTimePlan(String),
    #[error("grid too coarse: {0}")]
    Resolution(String),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("support violation: {0}")]
    Support(String),
    #[error("fit error: {0}")]
    Fit(String),
    #[error("calibration failed: {0}")]
    Calibration(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("malformed container: {0}")]
    Format(String),
}

pub type Result<T> = core::result::Result<T, Error>;
