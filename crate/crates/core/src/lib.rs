//! Exact grid simulation of trawl processes `X_t = L(A_t)` driven by a
//! homogeneous Lévy basis, plus partial-sum functionals, their exact and
//! asymptotic variances, and the estimators used to compare rescaled sums
//! with their limit laws.
//!
//! Everything numeric is generic over [`Scalar`] (implemented for `f32` and
//! `f64`); the aliases below fix `f64`, which is what the CLI uses.

// NaN must fail every range check, hence `!(x > 0)` style comparisons.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod levy;
pub mod quad;
pub mod rng;
pub mod scalar;
pub mod sim;
pub mod stats;
pub mod sums;
pub mod trawl;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type LevySeed = levy::LevySeedSpec<f64>;
pub type LevyMeasure = levy::LevyMeasureSpec<f64>;
pub type Trawl = trawl::TrawlFunction<f64>;
pub type Grid = sim::GridScheme<f64>;
pub type Ensemble = sim::PathEnsemble<f64>;
pub type Regime = sums::RegimeSpec<f64>;
pub type Complex64 = num_complex::Complex<f64>;
