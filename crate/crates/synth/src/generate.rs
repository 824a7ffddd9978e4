use gp::StPoint;
use plume_core::{GridSpec, Plume, PlumeSet, SensitivityUnits};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{SynthError, WindField};

/// Geometry and budget of a deposited ridge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlumeShape {
    /// Cross-section sigma at the origin, degrees.
    pub sigma0_deg: f64,
    /// Diffusive widening: sigma grows by this many degrees per
    /// sqrt(hour) of travel.
    pub sigma_growth: f64,
    /// e-folding time of the deposited intensity, hours.
    pub decay_hours: f64,
    /// Integration step, hours.
    pub step_hours: f64,
    /// Maximum travel time, hours.
    pub max_travel_hours: f64,
    /// Upper bound on the summed cell values of one plume.
    pub mass_budget: f64,
}

impl Default for PlumeShape {
    fn default() -> Self {
        Self {
            sigma0_deg: 0.15,
            sigma_growth: 0.22,
            decay_hours: 16.0,
            step_hours: 0.25,
            max_travel_hours: 60.0,
            mass_budget: 10.0,
        }
    }
}

/// Where and when releases happen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpawnBounds {
    pub lon_min: f64,
    pub lon_max: f64,
    pub lat_min: f64,
    pub lat_max: f64,
    pub t_min_hours: f64,
    pub t_max_hours: f64,
}

/// Advect a ridge from `origin` under the wind and deposit it on the
/// grid. The particle path is integrated from the release backwards in
/// time (sensitivities look upwind); a Gaussian cross-section widening as
/// the square root of travel time is stamped at every step, scaled by an
/// exponentially decaying intensity. The result is nonnegative, its total
/// mass is capped by the shape budget, and its departure angle equals the
/// wind direction at the origin by construction.
pub fn generate_plume_with(
    origin: StPoint,
    wind: &WindField,
    shape: &PlumeShape,
    grid: &GridSpec,
) -> Result<Plume, SynthError> {
    if !grid.covers(origin.lon, origin.lat) {
        return Err(SynthError::OriginOutsideGrid { lon: origin.lon, lat: origin.lat });
    }
    if shape.step_hours <= 0.0 || shape.sigma0_deg <= 0.0 || shape.mass_budget <= 0.0 {
        return Err(SynthError::InvalidParameter(format!("bad plume shape {shape:?}")));
    }

    let mut values = vec![0.0; grid.cells()];
    let (mut lon, mut lat) = (origin.lon, origin.lat);
    // half a grid margin so the ridge can run a little past the window
    let margin_lon = grid.d_lon * grid.n_lon as f64 * 0.5;
    let margin_lat = grid.d_lat * grid.n_lat as f64 * 0.5;

    let mut travel = 0.0;
    while travel <= shape.max_travel_hours {
        let t = origin.time_hours - travel;
        let sigma = shape.sigma0_deg + shape.sigma_growth * travel.sqrt();
        let amp = (-travel / shape.decay_hours).exp() * shape.step_hours;
        stamp_gaussian(grid, &mut values, lon, lat, sigma, amp);

        let dir = wind.direction_at(lon, lat, t);
        let speed = wind.speed_at(t);
        lon += speed * dir.cos() * shape.step_hours;
        lat += speed * dir.sin() * shape.step_hours;
        travel += shape.step_hours;

        if lon < grid.lon_min - margin_lon
            || lon > grid.lon_max() + margin_lon
            || lat < grid.lat_min - margin_lat
            || lat > grid.lat_max() + margin_lat
        {
            break;
        }
    }

    let total: f64 = values.iter().sum();
    if total > shape.mass_budget {
        let scale = shape.mass_budget / total;
        for v in &mut values {
            *v *= scale;
        }
    }

    let departure = wind.direction_at(origin.lon, origin.lat, origin.time_hours);
    Ok(Plume::new(
        *grid,
        values,
        SensitivityUnits::NsPerG,
        (origin.lon, origin.lat),
        (origin.time_hours * 3600.0).round() as i64,
        Some(crate::normalize(departure)),
    )?)
}

/// [`generate_plume_with`] under the default shape.
pub fn generate_plume(
    origin: StPoint,
    wind: &WindField,
    grid: &GridSpec,
) -> Result<Plume, SynthError> {
    generate_plume_with(origin, wind, &PlumeShape::default(), grid)
}

fn stamp_gaussian(grid: &GridSpec, values: &mut [f64], lon: f64, lat: f64, sigma: f64, amp: f64) {
    let reach = 3.0 * sigma;
    let i_lo = ((lon - reach - grid.lon_min) / grid.d_lon - 0.5).floor().max(0.0) as usize;
    let i_hi = (((lon + reach - grid.lon_min) / grid.d_lon - 0.5).ceil() as isize)
        .clamp(-1, grid.n_lon as isize - 1);
    let j_lo = ((lat - reach - grid.lat_min) / grid.d_lat - 0.5).floor().max(0.0) as usize;
    let j_hi = (((lat + reach - grid.lat_min) / grid.d_lat - 0.5).ceil() as isize)
        .clamp(-1, grid.n_lat as isize - 1);
    if i_hi < 0 || j_hi < 0 {
        return;
    }
    let inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);
    for j in j_lo..=(j_hi as usize) {
        for i in i_lo..=(i_hi as usize) {
            let (clon, clat) = grid.cell_center(i, j);
            let d2 = (clon - lon) * (clon - lon) + (clat - lat) * (clat - lat);
            if d2 <= reach * reach {
                values[grid.index(i, j)] += amp * (-d2 * inv_two_sigma_sq).exp();
            }
        }
    }
}

/// A seeded dataset: origins uniform in the spawn box, release times
/// uniform in the window, one plume each. Bit-reproducible per seed.
pub fn generate_dataset(
    n: usize,
    bounds: &SpawnBounds,
    wind: &WindField,
    shape: &PlumeShape,
    grid: &GridSpec,
    seed: u64,
) -> Result<PlumeSet, SynthError> {
    if n == 0 {
        return Err(SynthError::InvalidParameter("dataset size must be >= 1".into()));
    }
    if bounds.lon_min >= bounds.lon_max
        || bounds.lat_min >= bounds.lat_max
        || bounds.t_min_hours >= bounds.t_max_hours
    {
        return Err(SynthError::InvalidParameter(format!("degenerate spawn bounds {bounds:?}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut set = PlumeSet::new(*grid);
    for _ in 0..n {
        let origin = StPoint::new(
            rng.gen_range(bounds.lon_min..bounds.lon_max),
            rng.gen_range(bounds.lat_min..bounds.lat_max),
            rng.gen_range(bounds.t_min_hours..bounds.t_max_hours),
        );
        set.push(generate_plume_with(origin, wind, shape, grid)?)?;
    }
    Ok(set)
}
