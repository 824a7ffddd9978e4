use plume_core::{GridSpec, Plume};

use crate::PreprocessError;

/// Inverse-distance weighting parameters: weights are
/// `dist^-power` over the `k_neighbors` nearest source cell centers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdwParams {
    pub power: f64,
    pub k_neighbors: usize,
}

impl Default for IdwParams {
    fn default() -> Self {
        Self { power: 2.0, k_neighbors: 4 }
    }
}

/// Relative slack for deciding a query point sits exactly on a source
/// cell center (in units of one cell).
const EXACT_HIT_TOL: f64 = 1e-9;

/// IDW sample of a gridded field at a point, or `None` when the point is
/// outside the gridded area.
///
/// Exact hits on a cell center copy the source value; otherwise the k
/// nearest cell centers are located by expanding square rings around the
/// enclosing cell (ties broken by linear index, so results are
/// deterministic).
pub(crate) fn idw_sample(
    grid: &GridSpec,
    values: &[f64],
    lon: f64,
    lat: f64,
    params: &IdwParams,
) -> Option<f64> {
    if !grid.covers(lon, lat) {
        return None;
    }
    // fractional position in cell-center space
    let fx = (lon - grid.lon_min) / grid.d_lon - 0.5;
    let fy = (lat - grid.lat_min) / grid.d_lat - 0.5;

    let near_ix = fx.round();
    let near_iy = fy.round();
    if (fx - near_ix).abs() <= EXACT_HIT_TOL
        && (fy - near_iy).abs() <= EXACT_HIT_TOL
        && (0.0..grid.n_lon as f64).contains(&near_ix)
        && (0.0..grid.n_lat as f64).contains(&near_iy)
    {
        return Some(values[grid.index(near_ix as usize, near_iy as usize)]);
    }

    let cx = near_ix.clamp(0.0, (grid.n_lon - 1) as f64) as isize;
    let cy = near_iy.clamp(0.0, (grid.n_lat - 1) as f64) as isize;
    let k = params.k_neighbors.max(1).min(grid.cells());
    let min_cell = grid.d_lon.min(grid.d_lat);
    let max_ring = grid.n_lon.max(grid.n_lat) as isize;

    // best-k (squared distance, linear index), kept sorted ascending
    let mut best: Vec<(f64, usize)> = Vec::with_capacity(k + 8);
    let mut consider = |i: isize, j: isize, best: &mut Vec<(f64, usize)>| {
        if i < 0 || j < 0 || i >= grid.n_lon as isize || j >= grid.n_lat as isize {
            return;
        }
        let (clon, clat) = grid.cell_center(i as usize, j as usize);
        let (dx, dy) = (lon - clon, lat - clat);
        let d2 = dx * dx + dy * dy;
        let idx = grid.index(i as usize, j as usize);
        let pos = best
            .binary_search_by(|probe| {
                probe.partial_cmp(&(d2, idx)).expect("grid distances are finite")
            })
            .unwrap_err();
        if pos < k {
            best.insert(pos, (d2, idx));
            best.truncate(k);
        }
    };

    for ring in 0..=max_ring {
        if ring == 0 {
            consider(cx, cy, &mut best);
        } else {
            for i in (cx - ring)..=(cx + ring) {
                consider(i, cy - ring, &mut best);
                consider(i, cy + ring, &mut best);
            }
            for j in (cy - ring + 1)..=(cy + ring - 1) {
                consider(cx - ring, j, &mut best);
                consider(cx + ring, j, &mut best);
            }
        }
        // cells on later rings are at least (ring + 0.5) cells away along
        // one axis; once the k-th candidate beats that, stop
        if best.len() >= k {
            let ring_floor = (ring as f64 + 0.5) * min_cell;
            if best[k - 1].0 <= ring_floor * ring_floor {
                break;
            }
        }
    }

    let mut num = 0.0;
    let mut den = 0.0;
    let mut v_min = f64::INFINITY;
    let mut v_max = f64::NEG_INFINITY;
    for &(d2, idx) in &best {
        let w = d2.powf(-params.power / 2.0);
        num += w * values[idx];
        den += w;
        v_min = v_min.min(values[idx]);
        v_max = v_max.max(values[idx]);
    }
    // a weighted mean is a convex combination; clamping to the neighbor
    // range removes round-off overshoot and keeps constants exact
    (den > 0.0).then(|| (num / den).clamp(v_min, v_max))
}

/// Resample a plume onto a different grid by IDW over the k nearest
/// source cell centers. Target cells outside the source extent become 0
/// (reported once per call through `log::warn`). Metadata is preserved.
pub fn idw_resample(
    p: &Plume,
    target: &GridSpec,
    params: &IdwParams,
) -> Result<Plume, PreprocessError> {
    if params.k_neighbors == 0 || !(params.power > 0.0) {
        return Err(PreprocessError::InvalidParameter(format!("bad IDW parameters {params:?}")));
    }
    let src = p.grid();
    let mut uncovered = 0usize;
    let mut values = vec![0.0; target.cells()];
    for i_lat in 0..target.n_lat {
        for i_lon in 0..target.n_lon {
            let (lon, lat) = target.cell_center(i_lon, i_lat);
            match idw_sample(src, p.values(), lon, lat, params) {
                Some(v) => values[target.index(i_lon, i_lat)] = v,
                None => uncovered += 1,
            }
        }
    }
    if uncovered > 0 {
        log::warn!(
            "idw_resample: {uncovered} of {} target cells outside source coverage, set to 0",
            target.cells()
        );
    }
    Ok(Plume::new(*target, values, p.units, p.origin, p.time, p.departure_angle)?)
}
