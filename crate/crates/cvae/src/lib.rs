//! A convolutional variational autoencoder over canonical plume images.
//!
//! The encoder maps an image to a diagonal Gaussian on an r-dimensional
//! latent space (a mean vector and a log-variance vector); the decoder
//! maps latent draws back to images. Training minimizes, over images
//! `b_i`,
//!
//! ```text
//! sum_i [ (1/L) sum_l ||b_i - decode(u_i_l)||^2  +  lambda * KL_i ]
//! ```
//!
//! where `u_i_l = mean + exp(log_var/2) * eps` are reparameterized draws
//! from the variational posterior and `KL_i` is its closed-form
//! divergence from the standard-normal prior,
//! `-1/2 * sum (log s^2 + 1 - s^2 - m^2)`. The decoder's homoscedastic
//! noise variance never appears on its own — only `lambda` (twice that
//! variance) matters, so it is the stored tuning parameter.
//!
//! All shapes and channel counts live in one [`CvaeArch`] table; the
//! pinned default is six stride-preserving 3x3 convolutions with selu and
//! 2x2 max pooling down to a 1x1x64 bottleneck, two linear dense heads,
//! and a mirrored decoder of six exactly-doubling 4x4 transposed
//! convolutions. Training, encoding, and decoding all run through the
//! same recorded-graph forward, so gradients can never drift from the
//! inference path.

mod arch;
mod error;
mod latent;
mod loss;
mod model;
mod train;

pub use arch::CvaeArch;
pub use error::CvaeError;
pub use latent::{kl_term, sample_latent, LatentCode};
pub use loss::{loss, loss_frozen, loss_frozen_with_grads, reconstruction_mse};
pub use model::CvaeModel;
pub use train::{split_train_validation, train, RestartHistory, TrainConfig, TrainHistory};

/// Deterministic seed derivation for independent random streams.
pub(crate) fn derive_seed(parts: &[u64]) -> u64 {
    let mut h: u64 = 0x9E37_79B9_7F4A_7C15;
    for &p in parts {
        h ^= p.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(h << 6).wrapping_add(h >> 2);
        h = h.wrapping_mul(0xBF58_476D_1CE4_E5B9);
        h ^= h >> 27;
    }
    h
}
