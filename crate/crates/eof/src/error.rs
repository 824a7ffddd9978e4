use thiserror::Error;

#[derive(Debug, Error)]
pub enum EofError {
    #[error("rank {r} out of range 1..={max}")]
    RankOutOfRange { r: usize, max: usize },

    #[error("Jacobi sweep did not converge within {0} sweeps")]
    NonConvergence(usize),

    #[error("basis is rank-deficient: singular value {index} is {value:.3e}")]
    RankDeficient { index: usize, value: f64 },

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("malformed basis file: {0}")]
    Format(String),

    #[error(transparent)]
    Plume(#[from] plume_core::PlumeError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
