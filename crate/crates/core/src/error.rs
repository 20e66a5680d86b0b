use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("malformed netpbm header: {0}")]
    MalformedHeader(String),
    #[error("unsupported maxval {0}, only 255 is accepted")]
    UnsupportedMaxval(u32),
    #[error("truncated payload: expected {expected} bytes, got {actual}")]
    Truncated { expected: usize, actual: usize },
    #[error("invalid dimensions: {0}")]
    Dimensions(String),
    #[error("invalid structuring element: {0}")]
    InvalidStructuringElement(String),
    #[error("hysteresis thresholds out of order: high must exceed low")]
    ThresholdOrder,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("image contains no foreground pixels")]
    EmptyImage,
    #[error("no region satisfies the plate criteria")]
    NoCandidate,
    #[error("bounding box lies outside the image")]
    OutOfBounds,
}

pub type Result<T> = std::result::Result<T, Error>;
