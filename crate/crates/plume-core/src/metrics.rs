use crate::{Plume, PlumeError, PlumeSet};

/// Mean squared error between two plumes: `(1/K) * sum_k (a_k - b_k)^2`.
pub fn mse(a: &Plume, b: &Plume) -> Result<f64, PlumeError> {
    if a.grid() != b.grid() {
        return Err(PlumeError::ShapeMismatch("mse over plumes on different grids".into()));
    }
    Ok(mse_slices(a.values(), b.values()))
}

pub(crate) fn mse_slices(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let sum: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    sum / a.len() as f64
}

/// Sum of per-plume MSEs over two equally long plume sets, pairing by index.
pub fn sum_mse(a: &PlumeSet, b: &PlumeSet) -> Result<f64, PlumeError> {
    if a.len() != b.len() {
        return Err(PlumeError::ShapeMismatch(format!(
            "sum_mse over sets of different sizes ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    let mut total = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        total += mse(x, y)?;
    }
    Ok(total)
}
