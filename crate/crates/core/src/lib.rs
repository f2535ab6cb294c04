//! Training-free deep sigmoid networks for radial functions.
//!
//! The crate builds explicit networks from function samples (no training):
//! polynomial nets, a norm net approximating `|x|^2`, and a partition-of-unity
//! operator on top of it. The `analysis` module measures what those networks
//! achieve: sup errors, moduli of continuity, derivative bounds, fitted
//! convergence rates, and rate-based smoothness/radialness verdicts.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod activation;
pub mod analysis;
pub mod constructor;
pub mod corpus;
pub mod error;
pub mod netcore;
mod par;
pub mod precision;

pub use error::{DnoError, Result};
pub use netcore::{Layer, LayeredNetwork};
pub use precision::Precision;
