use thiserror::Error;

#[derive(Debug, Error)]
pub enum CvaeError {
    #[error("invalid architecture: {0}")]
    InvalidArchitecture(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),

    #[error("dataset too small: {0}")]
    DatasetTooSmall(String),

    #[error("every training restart aborted (non-finite loss)")]
    AllRestartsFailed,

    #[error("malformed checkpoint: {0}")]
    Format(String),

    #[error(transparent)]
    Tensor(#[from] tensor_autodiff::TensorError),

    #[error(transparent)]
    Plume(#[from] plume_core::PlumeError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
