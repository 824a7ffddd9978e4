//! Data model for gridded atmospheric sensitivity plumes.
//!
//! A *sensitivity plume* is a gridded field giving the sensitivity of a gas
//! mole-fraction observation at one space-time point to surface fluxes
//! everywhere in a rectangular domain. Stacking the plumes of `N`
//! observations row-wise yields a sensitivity matrix `B`, and for a
//! (time-invariant) flux field `y_f` the modelled mole fractions are the
//! matrix-vector product `y_m = B y_f`.
//!
//! This crate holds the shared vocabulary for the rest of the workspace:
//!
//! - [`GridSpec`]: a rectangular lon/lat gridding of the domain,
//! - [`Plume`]: one sensitivity field plus its origin/time/units metadata,
//! - [`PlumeSet`]: an ordered collection of plumes on a common grid,
//! - [`FluxField`]: a flux value per grid cell,
//! - mean-squared-error metrics ([`mse`], [`sum_mse`]),
//! - the `PLUMESET1` on-disk format ([`io`]).
//!
//! Values are stored row-major with longitude varying fastest; see
//! [`GridSpec::index`] for the single linearization used everywhere.

mod error;
mod grid;
pub mod io;
mod metrics;
mod plume;

pub use error::PlumeError;
pub use grid::GridSpec;
pub use metrics::{mse, sum_mse};
pub use plume::{apply_sensitivity, FluxField, Plume, PlumeSet, SensitivityUnits};
