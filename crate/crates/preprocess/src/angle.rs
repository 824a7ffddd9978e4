use plume_core::Plume;

use crate::PreprocessError;

/// Geometry of the departure-angle search.
///
/// The first pass looks for the strongest cell inside an annulus around
/// the origin (an annulus, not a disc, because turbulent cases put
/// non-zero sensitivity directly behind the origin and a disc search can
/// then point the wrong way). The second pass refines with a
/// sensitivity-weighted circular mean over an angular window around that
/// direction, out to `window_radius_deg`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleParams {
    pub annulus_inner_deg: f64,
    pub annulus_outer_deg: f64,
    pub window_radius_deg: f64,
}

impl Default for AngleParams {
    fn default() -> Self {
        Self { annulus_inner_deg: 0.5, annulus_outer_deg: 1.5, window_radius_deg: 2.0 }
    }
}

/// A departure direction with its unit-circle components.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleEstimate {
    /// Radians in (-pi, pi], counterclockwise from due east.
    pub angle: f64,
    pub east_component: f64,
    pub north_component: f64,
}

impl AngleEstimate {
    fn from_angle(angle: f64) -> Self {
        let angle = normalize_angle(angle);
        Self { angle, east_component: angle.cos(), north_component: angle.sin() }
    }
}

/// Wrap an angle to (-pi, pi].
pub fn normalize_angle(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut x = a.rem_euclid(two_pi); // [0, 2pi)
    if x > std::f64::consts::PI {
        x -= two_pi;
    }
    x
}

/// Signed circular difference `a - b` wrapped to (-pi, pi].
fn circular_diff(a: f64, b: f64) -> f64 {
    normalize_angle(a - b)
}

/// Estimate the direction a plume leaves its origin.
///
/// Step 1: the angle `a` subtended from the origin to the
/// maximum-sensitivity cell within the annulus. Step 2: a
/// sensitivity-weighted circular mean of the angles of all positive cells
/// within `window_radius_deg` of the origin whose angle lies inside
/// `(a - pi/4, a + pi/4)`. The circular mean (atan2 of weighted sin/cos
/// sums) avoids wrap-around artifacts near +/-pi.
pub fn estimate_departure_angle(
    p: &Plume,
    params: &AngleParams,
) -> Result<AngleEstimate, PreprocessError> {
    if !(params.annulus_inner_deg >= 0.0
        && params.annulus_outer_deg > params.annulus_inner_deg
        && params.window_radius_deg > 0.0)
    {
        return Err(PreprocessError::InvalidParameter(format!("bad angle search geometry {params:?}")));
    }
    let grid = p.grid();
    let (o_lon, o_lat) = p.origin;

    // step 1: strongest cell in the annulus
    let mut best: Option<(f64, f64)> = None; // (value, angle)
    for i_lat in 0..grid.n_lat {
        for i_lon in 0..grid.n_lon {
            let v = p.at(i_lon, i_lat);
            if v <= 0.0 {
                continue;
            }
            let (lon, lat) = grid.cell_center(i_lon, i_lat);
            let (dx, dy) = (lon - o_lon, lat - o_lat);
            let d = (dx * dx + dy * dy).sqrt();
            if d < params.annulus_inner_deg || d > params.annulus_outer_deg {
                continue;
            }
            if best.map_or(true, |(bv, _)| v > bv) {
                best = Some((v, dy.atan2(dx)));
            }
        }
    }
    let Some((_, coarse)) = best else {
        return Err(PreprocessError::AngleUndeterminable);
    };

    // step 2: weighted circular mean inside the angle window. A window
    // centered off the true direction clips one tail of the plume and
    // biases the mean toward its own center, so re-center it on the
    // running estimate until it settles (a few steps suffice).
    let quarter_pi = std::f64::consts::FRAC_PI_4;
    // 2x2 sub-cell quadrature: a cell near the origin subtends a wide
    // angular interval, which its center point alone represents badly
    let sub = [-0.25, 0.25];
    let mut center = coarse;
    for _ in 0..4 {
        let mut sum_sin = 0.0;
        let mut sum_cos = 0.0;
        for i_lat in 0..grid.n_lat {
            for i_lon in 0..grid.n_lon {
                let w = p.at(i_lon, i_lat);
                if w <= 0.0 {
                    continue;
                }
                let (lon, lat) = grid.cell_center(i_lon, i_lat);
                for su in sub {
                    for sv in sub {
                        let dx = lon + su * grid.d_lon - o_lon;
                        let dy = lat + sv * grid.d_lat - o_lat;
                        let d = (dx * dx + dy * dy).sqrt();
                        if d == 0.0 || d > params.window_radius_deg {
                            continue;
                        }
                        let phi = dy.atan2(dx);
                        if circular_diff(phi, center).abs() >= quarter_pi {
                            continue;
                        }
                        sum_sin += 0.25 * w * phi.sin();
                        sum_cos += 0.25 * w * phi.cos();
                    }
                }
            }
        }
        if sum_sin == 0.0 && sum_cos == 0.0 {
            // window radius excluded even the annulus maximum; fall back
            // to the coarse direction
            return Ok(AngleEstimate::from_angle(coarse));
        }
        let next = sum_sin.atan2(sum_cos);
        let moved = circular_diff(next, center).abs();
        center = next;
        if moved < 1e-3 {
            break;
        }
    }
    Ok(AngleEstimate::from_angle(center))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use plume_core::{GridSpec, SensitivityUnits};

    // 41x41 grid of 0.25-degree cells centered on the origin
    fn grid() -> GridSpec {
        GridSpec::centered(41, 41, 0.25, 0.25).unwrap()
    }

    // the grid is odd-sized, so cell (20, 20) has center (0, 0); putting
    // the origin there makes cell offsets exact multiples of 0.25
    fn plume_with_cells(cells: &[(usize, usize, f64)]) -> Plume {
        let g = grid();
        let mut values = vec![0.0; g.cells()];
        for &(i_lon, i_lat, v) in cells {
            values[g.index(i_lon, i_lat)] = v;
        }
        Plume::new(g, values, SensitivityUnits::NsPerG, (0.0, 0.0), 0, None).unwrap()
    }

    #[test]
    fn single_cell_due_east_gives_angle_zero() {
        let p = plume_with_cells(&[(24, 20, 1.0)]); // 1 degree east
        let est = estimate_departure_angle(&p, &AngleParams::default()).unwrap();
        assert_abs_diff_eq!(est.angle, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(est.east_component, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(est.north_component, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn single_cell_due_north_gives_half_pi() {
        let p = plume_with_cells(&[(20, 24, 1.0)]);
        let est = estimate_departure_angle(&p, &AngleParams::default()).unwrap();
        assert_abs_diff_eq!(est.angle, std::f64::consts::FRAC_PI_2, epsilon = 1e-12);
    }

    #[test]
    fn empty_annulus_is_undeterminable() {
        let p = plume_with_cells(&[(20, 20, 5.0)]); // only the origin cell itself
        assert!(matches!(
            estimate_departure_angle(&p, &AngleParams::default()),
            Err(PreprocessError::AngleUndeterminable)
        ));
    }

    #[test]
    fn backward_lobe_is_ignored_by_the_annulus() {
        // strong cell right behind the origin, inside the inner radius;
        // a weaker but valid cell to the north-east
        let p = plume_with_cells(&[(19, 20, 100.0), (23, 23, 1.0)]);
        let est = estimate_departure_angle(&p, &AngleParams::default()).unwrap();
        assert!(est.angle > 0.0, "picked the backward lobe: {}", est.angle);
    }

    #[test]
    fn components_sit_on_the_unit_circle() {
        for cells in [&[(24, 20, 2.0)][..], &[(16, 17, 1.5)], &[(20, 24, 0.3), (21, 24, 0.9)]] {
            let p = plume_with_cells(cells);
            let est = estimate_departure_angle(&p, &AngleParams::default()).unwrap();
            let norm = est.east_component * est.east_component
                + est.north_component * est.north_component;
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
            assert!(est.angle > -std::f64::consts::PI && est.angle <= std::f64::consts::PI);
        }
    }

    #[test]
    fn normalize_angle_wraps_into_half_open_interval() {
        use std::f64::consts::PI;
        assert_abs_diff_eq!(normalize_angle(3.0 * PI), PI, epsilon = 1e-12);
        assert_abs_diff_eq!(normalize_angle(-PI), PI, epsilon = 1e-12);
        assert_abs_diff_eq!(normalize_angle(0.3), 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(normalize_angle(-0.3 - 4.0 * PI), -0.3, epsilon = 1e-12);
    }
}
