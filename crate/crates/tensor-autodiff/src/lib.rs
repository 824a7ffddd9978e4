//! Minimal dense-array numerics with reverse-mode differentiation.
//!
//! Everything is 64-bit floats on desk-scale arrays: precision is cheaper
//! than debugging 32-bit drift at these sizes. The crate provides
//!
//! - [`Tensor`]: an immutable row-major array with a shape,
//! - eager layer ops ([`conv2d`], [`conv2d_transpose`], [`max_pool2d`],
//!   [`dense`], [`selu`], [`leaky_relu`]),
//! - [`Graph`]: a define-by-run tape whose [`Graph::backward`] pass yields
//!   exact gradients of a scalar loss for every recorded node,
//! - [`AdamState`]: the Adam optimizer with bias correction.
//!
//! The op set is deliberately closed: it is exactly what a convolutional
//! variational autoencoder with max pooling, selu/leaky-relu activations,
//! dense heads, and a Monte-Carlo Gaussian objective needs. There is no
//! broadcasting; shapes must agree exactly, and mismatches are reported as
//! structured [`TensorError`]s rather than panics.
//!
//! ```
//! use tensor_autodiff::{Graph, Tensor};
//!
//! // d/dx sum(x * x) = 2x
//! let mut g = Graph::new();
//! let x = g.param(Tensor::from_vec(vec![3], vec![1.0, -2.0, 0.5]).unwrap());
//! let sq = g.mul(x, x).unwrap();
//! let loss = g.sum(sq);
//! let grads = g.backward(loss).unwrap();
//! assert_eq!(grads.get(x).unwrap().data(), &[2.0, -4.0, 1.0]);
//! ```

mod adam;
mod error;
mod graph;
mod layers;
mod tensor;

pub use adam::AdamState;
pub use error::TensorError;
pub use graph::{Gradients, Graph, NodeId};
pub use layers::{
    conv2d, conv2d_output_side, conv2d_transpose, conv2d_transpose_output_side, dense,
    leaky_relu, max_pool2d, selu, SELU_ALPHA, SELU_LAMBDA,
};
pub use tensor::Tensor;
