//! Numerical laboratory for thin elastic plates.
//!
//! * [`material`]: stored-energy densities vanishing on SO(3) and the nearest-rotation map.
//! * [`reduction`]: the plate tensor obtained by minimizing out the transverse strain.
//! * [`plate2d`]: finite-difference dynamic von Karman and linear plate solvers.
//! * [`elasto3d`]: nonlinear elastodynamics on the rescaled slab `(-L, L)^2 x (-1/2, 1/2)`.
//! * [`harness`]: thickness ladders comparing slab averages with the plate limit.
//! * [`config`]/[`cli`]: JSON run configurations and the command-line driver.

// `!(x > 0.0)` is used on purpose so that NaN fails range checks
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cg;
pub mod cli;
pub mod config;
pub mod elasto3d;
pub mod error;
pub mod fields;
pub mod forcing;
pub mod harness;
pub mod material;
pub mod plate2d;
pub mod reduction;
pub mod tensor;

pub use error::{Error, Result};
pub use material::{polar_rotation, MaterialModel};
pub use reduction::{q2, q3, reduce, reduce_bruteforce};
pub use tensor::{ElasticTensor3, Mat2, Mat3, ReducedTensor2};
