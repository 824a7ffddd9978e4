//! Synthetic sensitivity plumes for end-to-end pipeline testing.
//!
//! Real plume datasets come from Lagrangian dispersion runs that are far
//! too expensive to ship with a test suite. What the emulation pipeline
//! actually relies on is not dispersion physics but one structural
//! premise: plumes released close together in space and time look alike,
//! because the meteorology steering them varies smoothly. This generator
//! reproduces exactly that premise and nothing more — a time-varying,
//! spatially warped wind field advects a ridge away from the origin,
//! widening diffusively (cross-section growing with the square root of
//! travel time) and decaying in intensity.
//!
//! Everything is deterministic given the seeds, so datasets are
//! bit-reproducible.

mod error;
mod generate;
mod wind;

pub use error::SynthError;
pub use generate::{generate_dataset, generate_plume, generate_plume_with, PlumeShape, SpawnBounds};
pub use wind::WindField;

/// Wrap an angle to (-pi, pi].
pub(crate) fn normalize(a: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut x = a.rem_euclid(two_pi);
    if x > std::f64::consts::PI {
        x -= two_pi;
    }
    x
}
