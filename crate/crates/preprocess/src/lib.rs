//! Turns raw simulator-style plumes into normalized training images.
//!
//! The pipeline order is: convert units ([`convert_units`]), drop plumes
//! with too little signal ([`weak_signal_filter`]), estimate each plume's
//! departure direction ([`estimate_departure_angle`]), rotate it into a
//! canonical origin-centered frame with departure angle zero
//! ([`rotate_to_canonical`]), and change resolution by inverse-distance
//! weighting ([`idw_resample`]). [`translate_to_site`] is the rigid
//! inverse of the origin subtraction, used when emulated plumes are
//! re-anchored at a site.
//!
//! Longitude/latitude are treated as planar coordinates for distances and
//! rotations — an approximation that is fine at regional scale and is the
//! same one the gridding itself makes.

mod angle;
mod error;
mod filter;
mod idw;
mod rotate;
mod units;

pub use angle::{estimate_departure_angle, normalize_angle, AngleEstimate, AngleParams};
pub use error::PreprocessError;
pub use filter::{pooled_quantile, weak_signal_filter};
pub use idw::{idw_resample, IdwParams};
pub use rotate::{rotate_to_canonical, translate_to_site};
pub use units::{convert_units, ConversionConfig, MOLAR_MASS_AIR, MOLAR_MASS_CH4};
