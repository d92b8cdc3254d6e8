//! Potential theory of subordinate Brownian motions.
//!
//! The crate evaluates complete Bernstein functions and the objects built
//! from them: potential and Lévy densities of the subordinator, Green and
//! jump kernels of `X_t = B_{S_t}`, ladder-height quantities in one
//! dimension, and Monte Carlo estimators for exit problems used to check
//! Harnack-type inequalities empirically.

// `!(x > 0.0)` is used on purpose so that NaN is rejected as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bernstein;
pub mod densities;
pub mod error;
pub mod harnack;
pub mod kernels;
pub mod ladder;
pub mod montecarlo;
pub mod numerics;

pub use bernstein::{Cbf, Kind};
pub use error::{Error, Result};
