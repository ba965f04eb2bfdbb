use serde::{Deserialize, Serialize};

use super::vector::Vector;
use crate::error::{Error, Result};

const ORTHONORMAL_TOL: f64 = 1e-12;

/// Closed convex nonempty set with a closed-form metric projection.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConvexSet {
    /// `{x : ⟨normal, x⟩ ≤ offset}`
    Halfspace { normal: Vector, offset: f64 },
    Ball { center: Vector, radius: f64 },
    Box { lower: Vector, upper: Vector },
    /// `anchor + span(basis)`, with an orthonormal basis (possibly empty).
    Affine { basis: Vec<Vector>, anchor: Vector },
}

impl ConvexSet {
    pub fn halfspace(normal: Vector, offset: f64) -> Result<Self> {
        let set = ConvexSet::Halfspace { normal, offset };
        set.validate()?;
        Ok(set)
    }

    pub fn ball(center: Vector, radius: f64) -> Result<Self> {
        let set = ConvexSet::Ball { center, radius };
        set.validate()?;
        Ok(set)
    }

    pub fn boxed(lower: Vector, upper: Vector) -> Result<Self> {
        let set = ConvexSet::Box { lower, upper };
        set.validate()?;
        Ok(set)
    }

    pub fn affine(basis: Vec<Vector>, anchor: Vector) -> Result<Self> {
        let set = ConvexSet::Affine { basis, anchor };
        set.validate()?;
        Ok(set)
    }

    /// Checks the well-formedness invariants. Deserialized sets must pass
    /// through here before use.
    pub fn validate(&self) -> Result<()> {
        match self {
            ConvexSet::Halfspace { normal, offset } => {
                if normal.norm_squared() == 0.0 {
                    return Err(Error::invalid("halfspace normal must be nonzero"));
                }
                if !offset.is_finite() {
                    return Err(Error::invalid("halfspace offset must be finite"));
                }
            }
            ConvexSet::Ball { radius, .. } => {
                if !(radius.is_finite() && *radius > 0.0) {
                    return Err(Error::invalid("ball radius must be positive and finite"));
                }
            }
            ConvexSet::Box { lower, upper } => {
                lower.check_dim(upper.dim())?;
                if let Some(i) = lower
                    .as_slice()
                    .iter()
                    .zip(upper.as_slice())
                    .position(|(l, u)| l > u)
                {
                    return Err(Error::invalid(format!("empty box: lower[{i}] > upper[{i}]")));
                }
            }
            ConvexSet::Affine { basis, anchor } => {
                if basis.len() > anchor.dim() {
                    return Err(Error::invalid("affine basis has more vectors than the dimension"));
                }
                for (i, u) in basis.iter().enumerate() {
                    u.check_dim(anchor.dim())?;
                    for (j, v) in basis.iter().enumerate().skip(i) {
                        let expected = if i == j { 1.0 } else { 0.0 };
                        if (u.dot(v) - expected).abs() > ORTHONORMAL_TOL {
                            return Err(Error::invalid(format!(
                                "affine basis is not orthonormal at ({i}, {j})"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexSet::Halfspace { normal, .. } => normal.dim(),
            ConvexSet::Ball { center, .. } => center.dim(),
            ConvexSet::Box { lower, .. } => lower.dim(),
            ConvexSet::Affine { anchor, .. } => anchor.dim(),
        }
    }

    /// Metric projection onto the set.
    pub fn project(&self, x: &Vector) -> Result<Vector> {
        x.check_dim(self.dim())?;
        Ok(self.project_unchecked(x))
    }

    pub(crate) fn project_unchecked(&self, x: &Vector) -> Vector {
        match self {
            ConvexSet::Halfspace { normal, offset } => {
                let excess = normal.dot(x) - offset;
                if excess <= 0.0 {
                    x.clone()
                } else {
                    x.lincomb(1.0, normal, -excess / normal.norm_squared())
                }
            }
            ConvexSet::Ball { center, radius } => {
                let offset = x - center;
                let dist = offset.norm();
                if dist <= *radius {
                    x.clone()
                } else {
                    center.lincomb(1.0, &offset, radius / dist)
                }
            }
            ConvexSet::Box { lower, upper } => {
                let clamped = x
                    .as_slice()
                    .iter()
                    .zip(lower.as_slice().iter().zip(upper.as_slice()))
                    .map(|(v, (l, u))| v.clamp(*l, *u))
                    .collect();
                Vector::from_dvector(nalgebra::DVector::from_vec(clamped))
            }
            ConvexSet::Affine { basis, anchor } => {
                let rel = x - anchor;
                basis
                    .iter()
                    .fold(anchor.clone(), |acc, u| acc.lincomb(1.0, u, u.dot(&rel)))
            }
        }
    }

    pub fn contains(&self, x: &Vector, tol: f64) -> bool {
        self.project_unchecked(x).distance(x) <= tol
    }

    /// Nearest point of the set to the origin; its norm is the smallest norm
    /// of any fixed point of the projection.
    pub fn min_norm_point(&self) -> Vector {
        self.project_unchecked(&Vector::zeros(self.dim()))
    }
}
