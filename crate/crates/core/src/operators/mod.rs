//! Operator algebra on finite-dimensional real inner-product spaces.

mod maps;
mod monotone;
pub mod sampling;
mod sets;
mod vector;

pub use maps::{
    averaged_from_cocoercive, compose, AveragedMap, ContractCheck, NonexpansiveMap,
    LINEAR_NORM_TOL,
};
pub use monotone::{MonotoneKind, MonotoneSource, DEFAULT_ZERO_CAP, PSD_TOL};
pub use sets::ConvexSet;
pub use vector::{Vector, MAX_DIM};
