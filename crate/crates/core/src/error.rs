use alloc::string::String;

/// Errors raised by the core algorithms.
///
/// Every variant is a caller mistake or an unsupported request; none of them
/// indicate internal corruption.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("non-finite coordinate at point {index}")]
    NonFinite { index: usize },
    #[error("{0}")]
    InvalidArgument(String),
    #[error("{what} is too large: {value} exceeds the limit of {limit}")]
    TooLarge {
        what: &'static str,
        value: usize,
        limit: usize,
    },
    #[error("{0} kernels have unbounded slope")]
    UnboundedSlope(&'static str),
    #[error("threshold {threshold} is at or above the kernel peak {peak}; the support is empty")]
    EmptySupport { threshold: f64, peak: f64 },
    #[error("evaluation net has no centers")]
    EmptyNet,
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
