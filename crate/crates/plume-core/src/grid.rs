use crate::PlumeError;

/// A rectangular lon/lat gridding of a spatial domain.
///
/// `lon_min`/`lat_min` are the lower-left corner of the lower-left cell;
/// `d_lon`/`d_lat` are the cell sizes in degrees. Cell `(i_lon, i_lat)`
/// covers `[lon_min + i_lon*d_lon, lon_min + (i_lon+1)*d_lon)` and is
/// addressed through the single linearization [`GridSpec::index`]
/// (row-major, longitude varying fastest).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub n_lon: usize,
    pub n_lat: usize,
    pub lon_min: f64,
    pub lat_min: f64,
    pub d_lon: f64,
    pub d_lat: f64,
}

impl GridSpec {
    /// Validating constructor: positive cell sizes, positive dimensions,
    /// and the whole extent inside lon [-180, 180], lat [-90, 90].
    pub fn new(
        n_lon: usize,
        n_lat: usize,
        lon_min: f64,
        lat_min: f64,
        d_lon: f64,
        d_lat: f64,
    ) -> Result<Self, PlumeError> {
        if n_lon == 0 || n_lat == 0 {
            return Err(PlumeError::InvalidGrid("grid dimensions must be positive".into()));
        }
        if !(d_lon > 0.0) || !(d_lat > 0.0) {
            return Err(PlumeError::InvalidGrid(format!(
                "cell sizes must be positive (d_lon={d_lon}, d_lat={d_lat})"
            )));
        }
        let grid = Self { n_lon, n_lat, lon_min, lat_min, d_lon, d_lat };
        let (lon_max, lat_max) = (grid.lon_max(), grid.lat_max());
        if lon_min < -180.0 || lon_max > 180.0 {
            return Err(PlumeError::InvalidGrid(format!(
                "longitude extent [{lon_min}, {lon_max}] outside [-180, 180]"
            )));
        }
        if lat_min < -90.0 || lat_max > 90.0 {
            return Err(PlumeError::InvalidGrid(format!(
                "latitude extent [{lat_min}, {lat_max}] outside [-90, 90]"
            )));
        }
        Ok(grid)
    }

    /// A grid of the given shape whose extent is centered on (0, 0).
    /// This is the canonical frame plumes are rotated into.
    pub fn centered(n_lon: usize, n_lat: usize, d_lon: f64, d_lat: f64) -> Result<Self, PlumeError> {
        let lon_min = -(n_lon as f64) * d_lon / 2.0;
        let lat_min = -(n_lat as f64) * d_lat / 2.0;
        Self::new(n_lon, n_lat, lon_min, lat_min, d_lon, d_lat)
    }

    /// The same grid rigidly shifted by `(d_lon_deg, d_lat_deg)`.
    ///
    /// No bounds re-validation: a regional window translated to a site may
    /// nominally poke past the +/-180/+/-90 box; downstream resampling only
    /// ever reads cell centers, so this is harmless at regional scale.
    pub fn shifted(&self, d_lon_deg: f64, d_lat_deg: f64) -> Self {
        Self {
            lon_min: self.lon_min + d_lon_deg,
            lat_min: self.lat_min + d_lat_deg,
            ..*self
        }
    }

    /// Number of grid cells `K`.
    pub fn cells(&self) -> usize {
        self.n_lon * self.n_lat
    }

    /// Row-major linear index with longitude varying fastest.
    #[inline]
    pub fn index(&self, i_lon: usize, i_lat: usize) -> usize {
        debug_assert!(i_lon < self.n_lon && i_lat < self.n_lat);
        i_lat * self.n_lon + i_lon
    }

    /// Inverse of [`GridSpec::index`].
    #[inline]
    pub fn unindex(&self, k: usize) -> (usize, usize) {
        (k % self.n_lon, k / self.n_lon)
    }

    /// Center of cell `(i_lon, i_lat)` in degrees.
    #[inline]
    pub fn cell_center(&self, i_lon: usize, i_lat: usize) -> (f64, f64) {
        (
            self.lon_min + (i_lon as f64 + 0.5) * self.d_lon,
            self.lat_min + (i_lat as f64 + 0.5) * self.d_lat,
        )
    }

    pub fn lon_max(&self) -> f64 {
        self.lon_min + self.n_lon as f64 * self.d_lon
    }

    pub fn lat_max(&self) -> f64 {
        self.lat_min + self.n_lat as f64 * self.d_lat
    }

    /// Whether a point lies inside the gridded area (cell-edge bounding box).
    pub fn covers(&self, lon: f64, lat: f64) -> bool {
        lon >= self.lon_min && lon <= self.lon_max() && lat >= self.lat_min && lat <= self.lat_max()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_is_row_major_lon_fastest() {
        let g = GridSpec::new(4, 3, 0.0, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(g.index(0, 0), 0);
        assert_eq!(g.index(1, 0), 1);
        assert_eq!(g.index(0, 1), 4);
        assert_eq!(g.index(3, 2), 11);
        for k in 0..g.cells() {
            let (i, j) = g.unindex(k);
            assert_eq!(g.index(i, j), k);
        }
    }

    #[test]
    fn rejects_bad_extents() {
        assert!(GridSpec::new(0, 3, 0.0, 0.0, 1.0, 1.0).is_err());
        assert!(GridSpec::new(4, 3, 0.0, 0.0, -1.0, 1.0).is_err());
        assert!(GridSpec::new(400, 3, 0.0, 0.0, 1.0, 1.0).is_err()); // lon past 180
        assert!(GridSpec::new(4, 200, 0.0, 0.0, 1.0, 1.0).is_err()); // lat past 90
    }

    #[test]
    fn centered_grid_is_symmetric() {
        let g = GridSpec::centered(64, 64, 0.352, 0.234).unwrap();
        assert!((g.lon_min + g.lon_max()).abs() < 1e-12);
        assert!((g.lat_min + g.lat_max()).abs() < 1e-12);
    }

    #[test]
    fn cell_centers() {
        let g = GridSpec::new(2, 2, 10.0, 20.0, 0.5, 0.25).unwrap();
        assert_eq!(g.cell_center(0, 0), (10.25, 20.125));
        assert_eq!(g.cell_center(1, 1), (10.75, 20.375));
    }
}
