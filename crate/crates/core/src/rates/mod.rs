//! Certified evaluation of the rate formulas.
//!
//! Real-valued quantities come back as [`RateValue`] enclosures computed in
//! MPFR with outward rounding; iteration counts come back as exact
//! [`RateIndex`] integers (ceilings of certified upper bounds).

mod bound_fn;
mod enclosure;
mod formulas;
mod star;

pub use bound_fn::{BoundFn, UpperBound};
pub use enclosure::Enclosure;
pub use formulas::{Modulus, RateContext, RateIndex, RateValue, DEFAULT_PRECISION, MIN_PRECISION};
pub use star::{star, star_f64, star_many, star_many_f64};
