use thiserror::Error;

/// Errors produced by plume construction, metrics, and the dataset format.
#[derive(Debug, Error)]
pub enum PlumeError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("value length {got} does not match grid cell count {expected}")]
    ValueLength { expected: usize, got: usize },

    #[error("grids do not match: {0}")]
    GridMismatch(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("malformed dataset: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
