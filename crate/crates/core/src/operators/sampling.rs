//! Seeded samplers shared by constructor-time contract checks and the
//! certification suites.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::vector::Vector;

/// Uniformly distributed unit vector.
pub fn random_direction<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> Vector {
    loop {
        let entries: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let v = Vector::from_dvector(nalgebra::DVector::from_vec(entries));
        let n = v.norm();
        if n > 1e-300 {
            return v.scale(1.0 / n);
        }
    }
}

/// Log-uniform sample in `[lo, hi]`.
pub fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    debug_assert!(0.0 < lo && lo <= hi);
    let t: f64 = rng.random();
    (lo.ln() + t * (hi.ln() - lo.ln())).exp()
}

/// Random direction with a log-uniform norm in `[1e-3·max_norm, max_norm]`.
pub fn random_vector<R: Rng + ?Sized>(rng: &mut R, dim: usize, max_norm: f64) -> Vector {
    let norm = log_uniform(rng, max_norm * 1e-3, max_norm);
    random_direction(rng, dim).scale(norm)
}
