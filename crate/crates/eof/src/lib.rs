//! Orthogonal-basis dimension reduction for plume sets.
//!
//! Stacking `N` canonical plume images row-wise gives an `N x K` matrix
//! `B`. Its singular value decomposition `B = U D V'` yields an
//! orthonormal spatial basis (rows of `V'`, one pattern per grid cell
//! layout) ordered by explained variability; truncating to the leading
//! `r` components gives the rank-`r` approximation `B ~ U_r D_r V_r'`.
//! New plumes are projected onto the basis by least squares, and latent
//! coefficient vectors are mapped back to images by the same product.
//!
//! The decomposition is computed in-repo with a one-sided Jacobi
//! iteration ([`svd`]): simple, and at desk scale as accurate as anything
//! else. No mean-centering is applied before the decomposition — the
//! basis decomposes `B` itself, not its anomalies, which differs from the
//! usual principal-component convention.

mod basis;
mod error;
pub mod io;
mod svd;

pub use basis::{fit_eof, reconstruct, regress_coefficients, EofBasis};
pub use error::EofError;
pub use svd::{svd, Svd};

/// Reassemble a basis from its persisted parts (used by [`io`]).
pub(crate) fn basis_io_parts(
    r: usize,
    grid: plume_core::GridSpec,
    singular_values: Vec<f64>,
    right_vectors: Vec<f64>,
    train_coeffs: Vec<f64>,
    n_train: usize,
) -> Result<EofBasis, EofError> {
    EofBasis::from_parts(r, grid, singular_values, right_vectors, train_coeffs, n_train)
}
