//! Semi-discrete transport distances between point clouds and the Lebesgue
//! measure on the unit cube, Lorentz-norm layer cakes of sampled gradients, and
//! numerical audits of transport-based quadrature-error inequalities.
//!
//! The pipeline is:
//!
//! 1. [`domain`] builds a [`domain::PointSet`], a [`domain::GridMeasure`] and a
//!    [`domain::ScalarField`] sampled at cell centers.
//! 2. [`transport`] solves the discretized W₁ and W∞ problems exactly on integers.
//! 3. [`norms`] evaluates L¹, L∞ and L^{d,1} norms of the gradient samples.
//! 4. [`inequalities`] assembles quadrature errors and every right-hand side.

// `!(x > 0.0)` is used deliberately so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod domain;
pub mod error;
pub mod geom;
pub mod inequalities;
pub mod norms;
pub mod transport;

pub use error::{Error, Result};
