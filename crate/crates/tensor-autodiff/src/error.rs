use thiserror::Error;

/// Structured errors for tensor construction and layer contracts.
#[derive(Debug, Error)]
pub enum TensorError {
    #[error("shape {shape:?} holds {expected} elements but {got} were supplied")]
    ShapeDataMismatch { shape: Vec<usize>, expected: usize, got: usize },

    #[error("dimension error in {op}: {detail}")]
    Dimension { op: &'static str, detail: String },

    #[error("backward requires a scalar loss, got a tensor of {len} elements")]
    NonScalarLoss { len: usize },

    #[error("parameter/gradient count mismatch: {params} parameters, {grads} gradients")]
    ParamCount { params: usize, grads: usize },
}

impl TensorError {
    pub(crate) fn dim(op: &'static str, detail: impl Into<String>) -> Self {
        TensorError::Dimension { op, detail: detail.into() }
    }
}
