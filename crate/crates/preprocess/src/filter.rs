use plume_core::PlumeSet;

use crate::PreprocessError;

/// Quantile of all values pooled across every plume in the set, with
/// linear interpolation between order statistics. Selection-based, so it
/// does not fully sort the pooled values.
pub fn pooled_quantile(set: &PlumeSet, q: f64) -> Result<f64, PreprocessError> {
    if set.is_empty() {
        return Err(PreprocessError::EmptyInput);
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(PreprocessError::InvalidParameter(format!("quantile {q} outside [0, 1]")));
    }
    let mut pool: Vec<f64> = set.iter().flat_map(|p| p.values().iter().copied()).collect();
    let n = pool.len();
    let h = (n - 1) as f64 * q;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;

    let (_, lo_val, rest) =
        pool.select_nth_unstable_by(lo, |a, b| a.partial_cmp(b).unwrap());
    let lo_val = *lo_val;
    if frac == 0.0 || rest.is_empty() {
        return Ok(lo_val);
    }
    let next = rest.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(lo_val + frac * (next - lo_val))
}

/// Drop plumes with weak signal: a plume survives only if strictly more
/// than `min_cells` of its values exceed the pooled
/// `keep_threshold_quantile` quantile of the whole set.
pub fn weak_signal_filter(
    set: &PlumeSet,
    keep_threshold_quantile: f64,
    min_cells: usize,
) -> Result<PlumeSet, PreprocessError> {
    let threshold = pooled_quantile(set, keep_threshold_quantile)?;
    let mut out = PlumeSet::new(*set.grid());
    for p in set.iter() {
        let strong = p.values().iter().filter(|&&v| v > threshold).count();
        if strong > min_cells {
            out.push(p.clone())?;
        }
    }
    Ok(out)
}
