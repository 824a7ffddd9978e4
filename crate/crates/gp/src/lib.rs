//! Independent spatio-temporal Gaussian-process emulators.
//!
//! Each latent plume feature gets its own GP over space-time points
//! `w = (lon, lat, t)`. The covariance is a spatio-temporal
//! squared-exponential,
//!
//! ```text
//! S(w_a, w_b) = sigma_st^2 * exp(-|s_a - s_b|^2 / (2 l_s) - |t_a - t_b| / (2 l_t))^2
//! ```
//!
//! (the bracketed exponential is squared, which is equivalent to doubling
//! both inverse length scales; maximum-likelihood fitting absorbs either
//! reading into `l_s`, `l_t`). Predictions use the exact noise-free
//! conditional mean and variance from a jittered Cholesky factorization
//! of the training Gram matrix; hyperparameters are fitted by maximizing
//! the exact log marginal likelihood with a quasi-Newton iteration on the
//! log-hyperparameters, restarted from several seeded initializations.
//!
//! Space is measured in degrees and time in hours throughout, so fitted
//! length scales are directly interpretable.

mod chol;
mod error;
mod kernel;
mod mle;
mod model;

pub use error::GpError;
pub use kernel::{kernel, GpHyper, StPoint};
pub use mle::{fit_mle, FitOptions};
pub use model::{GpModel, JitterSchedule};
