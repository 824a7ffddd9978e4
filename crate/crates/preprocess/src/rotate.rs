use plume_core::{GridSpec, Plume};

use crate::idw::idw_sample;
use crate::{IdwParams, PreprocessError};

/// Rotate a plume into the canonical frame: coordinates relative to the
/// plume origin, rotated by `-angle` so a departure angle of `angle`
/// becomes 0 (due east), resampled onto a grid of the same shape centered
/// on (0, 0).
///
/// The rotation is a pull-back: every canonical cell center is mapped
/// through the inverse transform and sampled from the source by IDW, so
/// the output has no holes. Canonical cells whose pre-image falls outside
/// the source extent become 0 (only relevant near the corners).
///
/// `departure_angle` metadata is carried through unchanged: for canonical
/// plumes it records the original-frame direction that was rotated away,
/// which is exactly what angle emulation downstream needs.
pub fn rotate_to_canonical(
    p: &Plume,
    angle: f64,
    idw: &IdwParams,
) -> Result<Plume, PreprocessError> {
    if !angle.is_finite() {
        return Err(PreprocessError::InvalidParameter(format!("non-finite rotation angle {angle}")));
    }
    let src = p.grid();
    let target = GridSpec::centered(src.n_lon, src.n_lat, src.d_lon, src.d_lat)?;
    let (o_lon, o_lat) = p.origin;
    let (cos_a, sin_a) = (angle.cos(), angle.sin());

    let mut values = vec![0.0; target.cells()];
    let mut uncovered = 0usize;
    for i_lat in 0..target.n_lat {
        for i_lon in 0..target.n_lon {
            let (x, y) = target.cell_center(i_lon, i_lat);
            // canonical = R(-angle) (source - origin), so the pre-image is
            // origin + R(angle) * canonical
            let src_lon = o_lon + cos_a * x - sin_a * y;
            let src_lat = o_lat + sin_a * x + cos_a * y;
            match idw_sample(src, p.values(), src_lon, src_lat, idw) {
                Some(v) => values[target.index(i_lon, i_lat)] = v,
                None => uncovered += 1,
            }
        }
    }
    if uncovered > 0 {
        log::debug!("rotate_to_canonical: {uncovered} canonical cells outside source coverage");
    }
    Ok(Plume::new(target, values, p.units, (0.0, 0.0), p.time, p.departure_angle)?)
}

/// Rigidly re-anchor a canonical-frame plume at a site: the grid window
/// and origin shift, the values do not. Exact inverse of the origin
/// subtraction performed by [`rotate_to_canonical`].
pub fn translate_to_site(p: &Plume, site: (f64, f64)) -> Plume {
    let grid = p.grid().shifted(site.0, site.1);
    Plume::new(
        grid,
        p.values().to_vec(),
        p.units,
        (p.origin.0 + site.0, p.origin.1 + site.1),
        p.time,
        p.departure_angle,
    )
    .expect("shifted grid keeps the cell count")
}

#[cfg(test)]
mod tests {
    use super::*;
    use plume_core::SensitivityUnits;

    fn centered_plume(n: usize, d: f64, values: Vec<f64>) -> Plume {
        let grid = GridSpec::centered(n, n, d, d).unwrap();
        Plume::new(grid, values, SensitivityUnits::NsPerG, (0.0, 0.0), 3600, Some(0.4)).unwrap()
    }

    #[test]
    fn zero_angle_at_origin_is_the_identity() {
        let values: Vec<f64> = (0..64).map(|i| (i as f64 * 0.31).sin()).collect();
        let p = centered_plume(8, 0.5, values.clone());
        let out = rotate_to_canonical(&p, 0.0, &IdwParams::default()).unwrap();
        assert_eq!(out.values(), &values[..]);
        assert_eq!(out.origin, (0.0, 0.0));
        assert_eq!(out.departure_angle, Some(0.4));
    }

    #[test]
    fn quarter_turn_of_a_constant_stays_constant() {
        let p = centered_plume(10, 0.4, vec![3.0; 100]);
        for angle in [std::f64::consts::FRAC_PI_2, std::f64::consts::PI] {
            let out = rotate_to_canonical(&p, angle, &IdwParams::default()).unwrap();
            assert!(
                out.values().iter().all(|&v| v == 3.0),
                "constant broken under rotation by {angle}"
            );
        }
    }

    #[test]
    fn arbitrary_rotation_keeps_constants_inside_the_inscribed_disc() {
        // corners can leave the source extent; the inscribed disc cannot
        let n = 20;
        let d = 0.3;
        let p = centered_plume(n, d, vec![1.25; n * n]);
        let out = rotate_to_canonical(&p, 0.7, &IdwParams::default()).unwrap();
        let grid = out.grid();
        let radius = n as f64 * d / 2.0;
        for i_lat in 0..n {
            for i_lon in 0..n {
                let (x, y) = grid.cell_center(i_lon, i_lat);
                let v = out.values()[grid.index(i_lon, i_lat)];
                if (x * x + y * y).sqrt() <= radius - d {
                    assert_eq!(v, 1.25, "disc cell ({i_lon},{i_lat}) distorted");
                } else {
                    assert!(v == 1.25 || v == 0.0, "corner cell has mixed value {v}");
                }
            }
        }
    }

    #[test]
    fn translate_is_exact_and_invertible() {
        let values: Vec<f64> = (0..36).map(|i| i as f64).collect();
        let p = centered_plume(6, 0.5, values.clone());

        let same = translate_to_site(&p, (0.0, 0.0));
        assert_eq!(same, p);

        let site = (12.25, 51.5);
        let moved = translate_to_site(&p, site);
        assert_eq!(moved.origin, site);
        assert_eq!(moved.values(), &values[..]);
        assert_eq!(moved.grid().lon_min, p.grid().lon_min + site.0);

        let back = translate_to_site(&moved, (-site.0, -site.1));
        assert_eq!(back.values(), p.values());
        assert_eq!(back.origin, (0.0, 0.0));
    }
}
