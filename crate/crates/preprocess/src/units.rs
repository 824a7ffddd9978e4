use plume_core::{Plume, SensitivityUnits};

use crate::PreprocessError;

/// Molar mass of "air", g mol^-1.
pub const MOLAR_MASS_AIR: f64 = 28.9644;
/// Molar mass of methane, g mol^-1.
pub const MOLAR_MASS_CH4: f64 = 16.0425;

/// Constants for the raw-output-to-sensitivity conversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConversionConfig {
    pub cell_volume_m3: f64,
    pub molar_mass_air: f64,
    pub molar_mass_ch4: f64,
}

impl ConversionConfig {
    pub fn new(cell_volume_m3: f64) -> Result<Self, PreprocessError> {
        Self::with_molar_masses(cell_volume_m3, MOLAR_MASS_AIR, MOLAR_MASS_CH4)
    }

    pub fn with_molar_masses(
        cell_volume_m3: f64,
        molar_mass_air: f64,
        molar_mass_ch4: f64,
    ) -> Result<Self, PreprocessError> {
        if !(cell_volume_m3 > 0.0) {
            return Err(PreprocessError::NonPositiveCellVolume(cell_volume_m3));
        }
        if !(molar_mass_air > 0.0) || !(molar_mass_ch4 > 0.0) {
            return Err(PreprocessError::InvalidParameter("molar masses must be positive".into()));
        }
        Ok(Self { cell_volume_m3, molar_mass_air, molar_mass_ch4 })
    }

    /// The full scale factor: divide by the cell volume (s kg^-1), scale
    /// by 1e-3 (s g^-1), by the molar-mass ratio air/methane (mole
    /// fraction instead of mass mixing ratio), and by 1e9 (ns g^-1).
    pub fn factor(&self) -> f64 {
        (1.0 / self.cell_volume_m3) * 1e-3 * (self.molar_mass_air / self.molar_mass_ch4) * 1e9
    }
}

/// Convert a time-summed raw plume (s m^3 kg^-1) to sensitivities in
/// ns g^-1. The units tag guards the non-idempotent factor chain:
/// converting an already-converted plume is an error.
pub fn convert_units(raw: &Plume, cfg: &ConversionConfig) -> Result<Plume, PreprocessError> {
    if raw.units != SensitivityUnits::SecondsM3PerKg {
        return Err(PreprocessError::UnitsMismatch {
            expected: SensitivityUnits::SecondsM3PerKg.tag(),
            got: raw.units.tag().to_string(),
        });
    }
    let factor = cfg.factor();
    let values = raw.values().iter().map(|v| v * factor).collect();
    let mut out = raw.with_values(values)?;
    out.units = SensitivityUnits::NsPerG;
    Ok(out)
}
