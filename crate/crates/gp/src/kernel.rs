/// A space-time point: longitude/latitude in degrees, time in hours.
///
/// Plume metadata stores time as integer seconds UTC;
/// [`StPoint::from_seconds`] performs the conversion to float hours.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StPoint {
    pub lon: f64,
    pub lat: f64,
    pub time_hours: f64,
}

impl StPoint {
    pub fn new(lon: f64, lat: f64, time_hours: f64) -> Self {
        Self { lon, lat, time_hours }
    }

    pub fn from_seconds(lon: f64, lat: f64, seconds: i64) -> Self {
        Self { lon, lat, time_hours: seconds as f64 / 3600.0 }
    }

    /// Squared planar spatial distance in degrees^2.
    #[inline]
    pub fn spatial_dist_sq(&self, other: &Self) -> f64 {
        let dx = self.lon - other.lon;
        let dy = self.lat - other.lat;
        dx * dx + dy * dy
    }

    /// Absolute time separation in hours.
    #[inline]
    pub fn time_dist(&self, other: &Self) -> f64 {
        (self.time_hours - other.time_hours).abs()
    }
}

/// Kernel hyperparameters, stored as logs for unconstrained optimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GpHyper {
    pub log_variance: f64,
    pub log_length_space: f64,
    pub log_length_time: f64,
}

impl GpHyper {
    /// From natural-scale values; all must be strictly positive.
    pub fn new(variance: f64, length_space: f64, length_time: f64) -> Self {
        assert!(
            variance > 0.0 && length_space > 0.0 && length_time > 0.0,
            "hyperparameters must be positive"
        );
        Self {
            log_variance: variance.ln(),
            log_length_space: length_space.ln(),
            log_length_time: length_time.ln(),
        }
    }

    pub fn from_logs(log_variance: f64, log_length_space: f64, log_length_time: f64) -> Self {
        Self { log_variance, log_length_space, log_length_time }
    }

    /// Process variance sigma_st^2.
    pub fn variance(&self) -> f64 {
        self.log_variance.exp()
    }

    /// Spatial length scale (squared-degrees scale).
    pub fn length_space(&self) -> f64 {
        self.log_length_space.exp()
    }

    /// Temporal length scale (hours scale).
    pub fn length_time(&self) -> f64 {
        self.log_length_time.exp()
    }

    pub(crate) fn logs(&self) -> [f64; 3] {
        [self.log_variance, self.log_length_space, self.log_length_time]
    }

    pub(crate) fn from_log_array(x: [f64; 3]) -> Self {
        Self { log_variance: x[0], log_length_space: x[1], log_length_time: x[2] }
    }
}

/// The spatio-temporal squared-exponential kernel. The exponential
/// bracket is squared, exactly as written in the module docs.
pub fn kernel(a: &StPoint, b: &StPoint, h: &GpHyper) -> f64 {
    let bracket =
        (-a.spatial_dist_sq(b) / (2.0 * h.length_space()) - a.time_dist(b) / (2.0 * h.length_time()))
            .exp();
    h.variance() * bracket * bracket
}
