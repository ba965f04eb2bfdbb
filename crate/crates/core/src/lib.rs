//! Averaged nonexpansive operators on finite-dimensional spaces, certified
//! rates of asymptotic regularity for their compositions, and a harness that
//! checks those rates (and the inequalities behind them) on concrete instances.
//!
//! The crate is split into four layers:
//!
//! - [`operators`]: vectors, convex sets, monotone sources, averaged maps.
//! - [`rates`]: the rate formulas, evaluated in extended precision with
//!   outward rounding so every returned value is a guaranteed upper bound.
//! - [`certify`]: Picard iteration and the property suites.
//! - [`instances`]: the JSON instance format and the builtin corpus.

// `!(a <= b)` is used on purpose so NaN lands on the failing side.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod error;
pub mod instances;
pub mod operators;
pub mod rates;

pub use error::{Error, Result};
