use thiserror::Error;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("origin ({lon}, {lat}) outside the grid")]
    OriginOutsideGrid { lon: f64, lat: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Plume(#[from] plume_core::PlumeError),
}
