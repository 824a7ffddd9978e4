use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A smooth synthetic wind: a base direction that drifts sinusoidally in
/// time plus a stationary spatial warp, and a speed that breathes slowly
/// around its base value. Phases are derived from the seed, so the same
/// seed always gives the same weather.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindField {
    /// Advection speed, degrees per hour.
    pub base_speed: f64,
    /// Mean departure direction, radians counterclockwise from east.
    pub base_direction: f64,
    /// Amplitude of the temporal direction drift, radians.
    pub direction_drift_amplitude: f64,
    /// Period of the temporal drift, hours.
    pub drift_period: f64,
    /// Amplitude of the stationary spatial direction warp, radians.
    pub warp_amplitude: f64,
    /// Spatial frequencies of the warp, radians per degree.
    pub warp_freq_lon: f64,
    pub warp_freq_lat: f64,
    /// Fractional speed modulation amplitude.
    pub speed_drift_frac: f64,
    pub seed: u64,
    phase_time: f64,
    phase_warp: f64,
    phase_speed: f64,
}

impl WindField {
    pub fn new(
        base_speed: f64,
        base_direction: f64,
        direction_drift_amplitude: f64,
        drift_period: f64,
        seed: u64,
    ) -> Self {
        assert!(base_speed > 0.0, "base_speed must be positive");
        assert!(drift_period > 0.0, "drift_period must be positive");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tau = 2.0 * std::f64::consts::PI;
        Self {
            base_speed,
            base_direction,
            direction_drift_amplitude,
            drift_period,
            warp_amplitude: 0.0,
            warp_freq_lon: 0.35,
            warp_freq_lat: 0.45,
            speed_drift_frac: 0.0,
            seed,
            phase_time: rng.gen_range(0.0..tau),
            phase_warp: rng.gen_range(0.0..tau),
            phase_speed: rng.gen_range(0.0..tau),
        }
    }

    pub fn with_spatial_warp(mut self, amplitude: f64, freq_lon: f64, freq_lat: f64) -> Self {
        self.warp_amplitude = amplitude;
        self.warp_freq_lon = freq_lon;
        self.warp_freq_lat = freq_lat;
        self
    }

    pub fn with_speed_drift(mut self, frac: f64) -> Self {
        self.speed_drift_frac = frac;
        self
    }

    /// Wind direction at a position and time, radians.
    pub fn direction_at(&self, lon: f64, lat: f64, t_hours: f64) -> f64 {
        let tau = 2.0 * std::f64::consts::PI;
        self.base_direction
            + self.direction_drift_amplitude
                * (tau * t_hours / self.drift_period + self.phase_time).sin()
            + self.warp_amplitude
                * (self.warp_freq_lon * lon + self.warp_freq_lat * lat + self.phase_warp).sin()
    }

    /// Wind speed at a time, degrees per hour.
    pub fn speed_at(&self, t_hours: f64) -> f64 {
        let tau = 2.0 * std::f64::consts::PI;
        // incommensurate with the direction period so the two do not lock
        let arg = tau * t_hours / (self.drift_period * 1.618) + self.phase_speed;
        self.base_speed * (1.0 + self.speed_drift_frac * arg.sin())
    }
}
