use crate::{GridSpec, PlumeError};

/// Units of the stored sensitivities.
///
/// Raw simulator output comes time-summed in s m^3 kg^-1; the conversion
/// chain turns it into ns g^-1 (strictly, ns g^-1 mol mol^-1). The tag
/// exists so the non-idempotent conversion cannot be applied twice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SensitivityUnits {
    /// Time-summed raw output, s m^3 kg^-1.
    SecondsM3PerKg,
    /// Converted sensitivities, ns g^-1.
    NsPerG,
}

impl SensitivityUnits {
    pub fn tag(&self) -> &'static str {
        match self {
            SensitivityUnits::SecondsM3PerKg => "s_m3_per_kg",
            SensitivityUnits::NsPerG => "ns_per_g",
        }
    }

    pub fn from_tag(tag: &str) -> Result<Self, PlumeError> {
        match tag {
            "s_m3_per_kg" => Ok(SensitivityUnits::SecondsM3PerKg),
            "ns_per_g" => Ok(SensitivityUnits::NsPerG),
            other => Err(PlumeError::Format(format!("unknown units tag {other:?}"))),
        }
    }
}

/// One gridded sensitivity field with its metadata.
///
/// `origin` is the lon/lat of the observation the plume belongs to and
/// `time` its observation time in integer seconds UTC. `departure_angle`
/// is the plume's departure direction in the *original* (site) frame, in
/// radians measured counterclockwise from due east; it is carried along
/// unchanged through rotation into the canonical frame, where it records
/// the rotation that was removed.
#[derive(Debug, Clone, PartialEq)]
pub struct Plume {
    grid: GridSpec,
    values: Vec<f64>,
    pub units: SensitivityUnits,
    pub origin: (f64, f64),
    pub time: i64,
    pub departure_angle: Option<f64>,
}

impl Plume {
    pub fn new(
        grid: GridSpec,
        values: Vec<f64>,
        units: SensitivityUnits,
        origin: (f64, f64),
        time: i64,
        departure_angle: Option<f64>,
    ) -> Result<Self, PlumeError> {
        if values.len() != grid.cells() {
            return Err(PlumeError::ValueLength { expected: grid.cells(), got: values.len() });
        }
        Ok(Self { grid, values, units, origin, time, departure_angle })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Same metadata, new values on the same grid.
    pub fn with_values(&self, values: Vec<f64>) -> Result<Self, PlumeError> {
        Self::new(self.grid, values, self.units, self.origin, self.time, self.departure_angle)
    }

    /// Sensitivity at cell `(i_lon, i_lat)`.
    #[inline]
    pub fn at(&self, i_lon: usize, i_lat: usize) -> f64 {
        self.values[self.grid.index(i_lon, i_lat)]
    }

    /// Clamp all negative sensitivities to zero.
    ///
    /// Dimension reduction occasionally reconstructs small negative
    /// sensitivities (magnitudes like -0.0013 ns g^-1 against maxima near
    /// 0.052 ns g^-1); they carry no physical meaning and are zeroed.
    pub fn truncate_negatives(&self) -> Plume {
        let values = self.values.iter().map(|&v| v.max(0.0)).collect();
        Plume { values, ..self.clone() }
    }
}

/// An ordered collection of plumes sharing one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PlumeSet {
    grid: GridSpec,
    plumes: Vec<Plume>,
}

impl PlumeSet {
    pub fn new(grid: GridSpec) -> Self {
        Self { grid, plumes: Vec::new() }
    }

    pub fn from_plumes(grid: GridSpec, plumes: Vec<Plume>) -> Result<Self, PlumeError> {
        let mut set = Self::new(grid);
        for p in plumes {
            set.push(p)?;
        }
        Ok(set)
    }

    pub fn push(&mut self, plume: Plume) -> Result<(), PlumeError> {
        if *plume.grid() != self.grid {
            return Err(PlumeError::GridMismatch(format!(
                "plume grid {:?} differs from set grid {:?}",
                plume.grid(),
                self.grid
            )));
        }
        self.plumes.push(plume);
        Ok(())
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.plumes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plumes.is_empty()
    }

    pub fn plumes(&self) -> &[Plume] {
        &self.plumes
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Plume> {
        self.plumes.iter()
    }
}

/// A flux value per grid cell, same linearization as plume values.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxField {
    grid: GridSpec,
    values: Vec<f64>,
}

impl FluxField {
    pub fn new(grid: GridSpec, values: Vec<f64>) -> Result<Self, PlumeError> {
        if values.len() != grid.cells() {
            return Err(PlumeError::ValueLength { expected: grid.cells(), got: values.len() });
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Apply the discretised sensitivity relationship: the i-th output is the
/// dot product of plume i with the flux field, i.e. the modelled
/// mole-fraction contribution at observation i.
pub fn apply_sensitivity(plumes: &PlumeSet, flux: &FluxField) -> Result<Vec<f64>, PlumeError> {
    if plumes.grid() != flux.grid() {
        return Err(PlumeError::GridMismatch(
            "plume set and flux field are on different grids".into(),
        ));
    }
    let f = flux.values();
    Ok(plumes
        .iter()
        .map(|p| p.values().iter().zip(f).map(|(b, y)| b * y).sum())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid4() -> GridSpec {
        GridSpec::new(2, 2, 0.0, 0.0, 1.0, 1.0).unwrap()
    }

    fn plume(values: Vec<f64>) -> Plume {
        Plume::new(grid4(), values, SensitivityUnits::NsPerG, (0.0, 0.0), 0, None).unwrap()
    }

    #[test]
    fn rejects_wrong_value_length() {
        assert!(Plume::new(grid4(), vec![0.0; 3], SensitivityUnits::NsPerG, (0.0, 0.0), 0, None)
            .is_err());
    }

    #[test]
    fn set_rejects_grid_mismatch() {
        let other = GridSpec::new(3, 2, 0.0, 0.0, 1.0, 1.0).unwrap();
        let p = Plume::new(other, vec![0.0; 6], SensitivityUnits::NsPerG, (0.0, 0.0), 0, None)
            .unwrap();
        let mut set = PlumeSet::new(grid4());
        assert!(set.push(p).is_err());
    }

    #[test]
    fn zero_flux_gives_zero_mole_fractions() {
        let mut set = PlumeSet::new(grid4());
        set.push(plume(vec![1.0, 2.0, 3.0, 4.0])).unwrap();
        let flux = FluxField::new(grid4(), vec![0.0; 4]).unwrap();
        assert_eq!(apply_sensitivity(&set, &flux).unwrap(), vec![0.0]);
    }

    #[test]
    fn indicator_flux_selects_cell() {
        let mut set = PlumeSet::new(grid4());
        set.push(plume(vec![1.0, 2.0, 3.0, 4.0])).unwrap();
        set.push(plume(vec![5.0, 6.0, 7.0, 8.0])).unwrap();
        let flux = FluxField::new(grid4(), vec![0.0, 0.0, 1.0, 0.0]).unwrap();
        assert_eq!(apply_sensitivity(&set, &flux).unwrap(), vec![3.0, 7.0]);
    }

    #[test]
    fn random_case_matches_nested_loop_oracle() {
        // brute-force dot product, written independently of the iterator path
        let b = [
            vec![0.3, -1.2, 2.5, 0.0],
            vec![1.0, 1.0, -0.5, 4.0],
            vec![-2.0, 0.25, 0.125, 8.0],
        ];
        let y = [0.5, -1.5, 2.0, 0.25];
        let mut set = PlumeSet::new(grid4());
        for row in &b {
            set.push(plume(row.clone())).unwrap();
        }
        let flux = FluxField::new(grid4(), y.to_vec()).unwrap();
        let got = apply_sensitivity(&set, &flux).unwrap();
        for (i, row) in b.iter().enumerate() {
            let mut expect = 0.0;
            for k in 0..4 {
                expect += row[k] * y[k];
            }
            assert!((got[i] - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn truncate_negatives_examples() {
        let p = plume(vec![-0.0013, 0.052, 0.0, -1.0]);
        let t = p.truncate_negatives();
        assert_eq!(t.values(), &[0.0, 0.052, 0.0, 0.0]);
        // idempotent
        assert_eq!(t.truncate_negatives().values(), t.values());
        // nonnegative input unchanged
        let q = plume(vec![0.1, 0.2, 0.3, 0.0]);
        assert_eq!(q.truncate_negatives().values(), q.values());
    }
}
