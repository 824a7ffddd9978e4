use plume_core::PlumeSet;

use crate::PipelineError;

/// Remove every second plume: sort by (time, site), keep even positions,
/// remove odd ones (0-based). The removed half is what gets emulated.
pub fn holdout_split(plumes: &PlumeSet) -> Result<(PlumeSet, PlumeSet), PipelineError> {
    if plumes.len() < 2 {
        return Err(PipelineError::config(format!(
            "holdout split needs at least 2 plumes, got {}",
            plumes.len()
        )));
    }
    let mut order: Vec<usize> = (0..plumes.len()).collect();
    order.sort_by(|&a, &b| {
        let pa = &plumes.plumes()[a];
        let pb = &plumes.plumes()[b];
        (pa.time, pa.origin.0, pa.origin.1)
            .partial_cmp(&(pb.time, pb.origin.0, pb.origin.1))
            .expect("finite sort keys")
    });

    let mut kept = PlumeSet::new(*plumes.grid());
    let mut removed = PlumeSet::new(*plumes.grid());
    for (pos, &idx) in order.iter().enumerate() {
        let plume = plumes.plumes()[idx].clone();
        if pos % 2 == 0 {
            kept.push(plume)?;
        } else {
            removed.push(plume)?;
        }
    }
    Ok((kept, removed))
}

#[cfg(test)]
mod tests {
    use super::*;
    use plume_core::{GridSpec, Plume, SensitivityUnits};

    fn set_with_times(times: &[i64]) -> PlumeSet {
        let grid = GridSpec::new(2, 1, 0.0, 0.0, 1.0, 1.0).unwrap();
        let mut set = PlumeSet::new(grid);
        for (i, &t) in times.iter().enumerate() {
            set.push(
                Plume::new(
                    grid,
                    vec![i as f64, 0.0],
                    SensitivityUnits::NsPerG,
                    (0.0, 0.0),
                    t,
                    None,
                )
                .unwrap(),
            )
            .unwrap();
        }
        set
    }

    #[test]
    fn four_plumes_alternate() {
        let set = set_with_times(&[30, 10, 40, 20]);
        let (kept, removed) = holdout_split(&set).unwrap();
        assert_eq!(kept.len(), 2);
        assert_eq!(removed.len(), 2);
        let kept_times: Vec<i64> = kept.iter().map(|p| p.time).collect();
        let removed_times: Vec<i64> = removed.iter().map(|p| p.time).collect();
        assert_eq!(kept_times, vec![10, 30]);
        assert_eq!(removed_times, vec![20, 40]);
    }

    #[test]
    fn union_is_the_original_multiset() {
        let set = set_with_times(&[5, 3, 9, 1, 7]);
        let (kept, removed) = holdout_split(&set).unwrap();
        assert_eq!(kept.len() + removed.len(), set.len());
        let mut all: Vec<i64> = kept.iter().chain(removed.iter()).map(|p| p.time).collect();
        all.sort_unstable();
        let mut orig: Vec<i64> = set.iter().map(|p| p.time).collect();
        orig.sort_unstable();
        assert_eq!(all, orig);
    }

    #[test]
    fn fewer_than_two_is_an_error() {
        let set = set_with_times(&[1]);
        let err = holdout_split(&set).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn split_is_stable_under_file_round_trip() {
        let set = set_with_times(&[30, 10, 40, 20, 50, 60]);
        let mut bytes = Vec::new();
        plume_core::io::write_plumeset(&mut bytes, &set).unwrap();
        let reloaded = plume_core::io::read_plumeset(bytes.as_slice()).unwrap();
        let (k1, r1) = holdout_split(&set).unwrap();
        let (k2, r2) = holdout_split(&reloaded).unwrap();
        assert_eq!(k1, k2);
        assert_eq!(r1, r2);
    }
}
