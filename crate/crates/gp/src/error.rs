use thiserror::Error;

#[derive(Debug, Error)]
pub enum GpError {
    #[error("need at least {need} training points, got {got}")]
    TooFewPoints { need: usize, got: usize },

    #[error("input lengths differ: {points} points vs {targets} targets")]
    LengthMismatch { points: usize, targets: usize },

    #[error("Gram matrix is not positive definite (pivot {pivot} at row {row}), jitter {jitter:.3e}")]
    NotPositiveDefinite { row: usize, pivot: f64, jitter: f64 },

    #[error("maximum-likelihood fit failed: {0}")]
    FitFailure(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
}
