//! l1-penalized least squares for regressions with AR(1)-autocorrelated
//! errors: the plain LASSO, its generalized-least-squares variant with a
//! known error coefficient, and the feasible variant that estimates the
//! coefficient from first-stage residuals. Includes the synthetic data
//! generator, penalty tuning (closed-form and temporal cross-validation),
//! error/bound diagnostics, and a deterministic Monte Carlo harness.

// validation deliberately writes `!(x > 0.0)` so NaN fails closed
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod datagen;
pub mod diagnostics;
pub mod error;
pub mod mc;
pub mod solver;
pub mod tuning;
pub mod whiten;

pub use error::{Error, Result};
