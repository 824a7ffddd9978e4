use thiserror::Error;

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error("cell volume must be positive, got {0}")]
    NonPositiveCellVolume(f64),

    #[error("plume units are {got:?}, expected {expected:?}")]
    UnitsMismatch { expected: &'static str, got: String },

    #[error("empty plume set")]
    EmptyInput,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("departure angle undeterminable: no positive sensitivity in the annulus")]
    AngleUndeterminable,

    #[error(transparent)]
    Plume(#[from] plume_core::PlumeError),
}
