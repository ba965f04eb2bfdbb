//! Instance files and the builtin corpus.
//!
//! An instance is a composition `R = R_m ∘ … ∘ R_1` of averaged factors
//! together with a start point, an approximate fixed point bound `K` and the
//! rate parameters `b` and `d`.

mod corpus;
mod spec;

use nalgebra::DMatrix;
use rug::Rational;

pub use corpus::builtin_corpus;
pub use spec::{FactorKind, FactorSpec, InstanceSpec, Metadata, Param};

use crate::error::{Error, Result};
use crate::operators::{compose, AveragedMap, ConvexSet, MonotoneSource, NonexpansiveMap, Vector};
use crate::rates::{star_many, BoundFn};

/// Added to computed norms when `b` or `d` is `"auto"`.
pub const AUTO_SLACK: f64 = 1e-12;

/// Tolerance for the fixed-point claims recorded in metadata.
pub const FIXED_POINT_TOL: f64 = 1e-9;

/// A validated instance with its maps built and `"auto"` fields resolved.
#[derive(Clone, Debug)]
pub struct Instance {
    spec: InstanceSpec,
    x0: Vector,
    factors: Vec<AveragedMap>,
    map: AveragedMap,
    alpha: Rational,
    b: f64,
    d: f64,
    common_fixed_point: Option<Vector>,
}

/// Parses and validates instance JSON.
pub fn parse_instance(text: &str) -> Result<Instance> {
    Instance::from_spec(InstanceSpec::from_json(text)?)
}

impl Instance {
    pub fn from_spec(spec: InstanceSpec) -> Result<Self> {
        let dim = spec.dim;
        if dim == 0 || dim > crate::operators::MAX_DIM {
            return Err(Error::validation("dim", format!("must lie in 1..={}", crate::operators::MAX_DIM)));
        }
        if spec.id.trim().is_empty() {
            return Err(Error::validation("id", "must not be empty"));
        }
        if spec.factors.len() < 2 {
            return Err(Error::validation("factors", "a composition needs at least two factors"));
        }
        let x0 = Vector::new(spec.x0.clone()).map_err(|e| Error::validation("x0", e.to_string()))?;
        if x0.dim() != dim {
            return Err(Error::validation("x0", format!("expected {dim} entries, got {}", x0.dim())));
        }
        spec.k.validate().map_err(|e| Error::validation("K", e.to_string()))?;
        if spec.eps_grid.is_empty() {
            return Err(Error::validation("eps_grid", "must not be empty"));
        }
        for (i, e) in spec.eps_grid.iter().enumerate() {
            if !(e.is_finite() && *e > 0.0) {
                return Err(Error::validation(format!("eps_grid[{i}]"), "must be positive and finite"));
            }
        }

        let mut factors = Vec::with_capacity(spec.factors.len());
        let mut fixed_norm: f64 = 0.0;
        for (i, f) in spec.factors.iter().enumerate() {
            let (map, p) = build_factor(i, f, dim)?;
            fixed_norm = fixed_norm.max(p.norm());
            factors.push(map);
        }
        let alpha = star_many(
            &spec
                .factors
                .iter()
                .map(|f| Rational::from_f64(f.alpha).expect("checked finite"))
                .collect::<Vec<_>>(),
        )?;
        let map = compose(&factors).map_err(|e| Error::validation("factors", e.to_string()))?;

        // K is only accepted when a known fixed point of every factor witnesses it
        let k_floor = k_infimum(&spec.k);
        if k_floor < fixed_norm - FIXED_POINT_TOL {
            return Err(Error::validation(
                "K",
                format!("infimum {k_floor} is below the fixed-point norm {fixed_norm} of some factor"),
            ));
        }

        let x0_norm = x0.norm();
        if !x0_norm.is_finite() {
            return Err(Error::validation("x0", "norm overflows"));
        }
        let b = match spec.b {
            Param::Auto => x0_norm + AUTO_SLACK,
            Param::Value(b) => {
                if !(b.is_finite() && b > 0.0) {
                    return Err(Error::validation("b", "must be positive and finite"));
                }
                if b < x0_norm {
                    return Err(Error::validation("b", format!("{b} is below ‖x0‖ = {x0_norm}")));
                }
                b
            }
        };
        let disp = x0.distance(&map.eval(&x0)?);
        if !disp.is_finite() {
            return Err(Error::validation("x0", "the displacement ‖x0 − R x0‖ is not finite"));
        }
        let d = match spec.d {
            Param::Auto => disp + AUTO_SLACK,
            Param::Value(d) => {
                if !(d.is_finite() && d > 0.0) {
                    return Err(Error::validation("d", "must be positive and finite"));
                }
                if d < disp {
                    return Err(Error::validation("d", format!("{d} is below ‖x0 − R x0‖ = {disp}")));
                }
                d
            }
        };

        let common_fixed_point = match &spec.metadata.common_fixed_point {
            None => None,
            Some(p) => {
                let field = "metadata.common_fixed_point";
                let p = Vector::new(p.clone()).map_err(|e| Error::validation(field, e.to_string()))?;
                if p.dim() != dim {
                    return Err(Error::validation(field, format!("expected {dim} entries")));
                }
                for (i, f) in factors.iter().enumerate() {
                    let gap = p.distance(&f.eval(&p)?);
                    if gap > FIXED_POINT_TOL {
                        return Err(Error::validation(field, format!("moved by factor {i} (distance {gap})")));
                    }
                }
                Some(p)
            }
        };

        Ok(Instance {
            spec,
            x0,
            factors,
            map,
            alpha,
            b,
            d,
            common_fixed_point,
        })
    }

    pub fn id(&self) -> &str {
        &self.spec.id
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn spec(&self) -> &InstanceSpec {
        &self.spec
    }

    pub fn m(&self) -> usize {
        self.factors.len()
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.spec.factors.iter().map(|f| f.alpha).collect()
    }

    /// `α₁ ⋆ … ⋆ αₘ`, exactly.
    pub fn composed_alpha(&self) -> &Rational {
        &self.alpha
    }

    pub fn factors(&self) -> &[AveragedMap] {
        &self.factors
    }

    /// The composite `R_m ∘ … ∘ R_1`.
    pub fn map(&self) -> &AveragedMap {
        &self.map
    }

    pub fn x0(&self) -> &Vector {
        &self.x0
    }

    pub fn k(&self) -> &BoundFn {
        &self.spec.k
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn eps_grid(&self) -> &[f64] {
        &self.spec.eps_grid
    }

    pub fn common_fixed_point(&self) -> Option<&Vector> {
        self.common_fixed_point.as_ref()
    }

    /// Canonical JSON text; parsing it gives back the same instance.
    pub fn to_canonical_json(&self) -> String {
        self.spec.to_canonical_json()
    }
}

/// `inf_ε K(ε)`, attained as `ε → ∞` since `K` is nonincreasing.
fn k_infimum(k: &BoundFn) -> f64 {
    match k {
        BoundFn::Constant { value } => *value,
        BoundFn::InversePower { c0, .. } => *c0,
        BoundFn::StepTable { points } => points.last().map_or(0.0, |p| p.1),
    }
}

fn matrix(rows: &[Vec<f64>], dim: usize, field: &str) -> Result<DMatrix<f64>> {
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(Error::validation(field, format!("expected a {dim}×{dim} matrix")));
    }
    if rows.iter().flatten().any(|v| !v.is_finite()) {
        return Err(Error::validation(field, "entries must be finite"));
    }
    Ok(DMatrix::from_fn(dim, dim, |i, j| rows[i][j]))
}

/// Builds factor `i` and returns it with a known fixed point.
fn build_factor(i: usize, f: &FactorSpec, dim: usize) -> Result<(AveragedMap, Vector)> {
    let at = |s: &str| format!("factors[{i}].{s}");
    let alpha = f.alpha;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::validation(at("alpha"), format!("{alpha} must lie strictly inside (0, 1)")));
    }
    let wrap = |field: String| move |e: Error| Error::validation(field, e.to_string());
    match &f.kind {
        FactorKind::Projection { set } => {
            set.validate().map_err(wrap(at("params.set")))?;
            if set.dim() != dim {
                return Err(Error::validation(at("params.set"), format!("set lives in dimension {}", set.dim())));
            }
            let p = set.min_norm_point();
            let inner = NonexpansiveMap::projection(set.clone())?;
            Ok((AveragedMap::new(alpha, inner)?, p))
        }
        FactorKind::RotationAvg { theta, scale } => {
            let inner = NonexpansiveMap::rotation(dim, *theta, *scale).map_err(wrap(at("params")))?;
            Ok((AveragedMap::new(alpha, inner)?, Vector::zeros(dim)))
        }
        FactorKind::AveragedLinear { matrix: rows } => {
            let m = matrix(rows, dim, &at("params.matrix"))?;
            let inner = NonexpansiveMap::linear(m).map_err(wrap(at("params.matrix")))?;
            Ok((AveragedMap::new(alpha, inner)?, Vector::zeros(dim)))
        }
        FactorKind::LinearResolvent { matrix: rows, beta } => {
            let m = matrix(rows, dim, &at("params.matrix"))?;
            let src = MonotoneSource::linear(m).map_err(wrap(at("params.matrix")))?;
            let src = match beta {
                Param::Auto => {
                    let b = src.cocoercivity_constant().map_err(wrap(at("params.beta")))?;
                    src.with_beta(b)
                }
                Param::Value(b) => src.with_beta(*b),
            }
            .map_err(wrap(at("params.beta")))?;
            let beta = src.beta().expect("attached above");
            let needed = 1.0 / (1.0 + beta);
            if alpha < needed * (1.0 - 1e-12) {
                return Err(Error::validation(
                    at("alpha"),
                    format!("{alpha} is below (1 + β)⁻¹ = {needed} for β = {beta}"),
                ));
            }
            let map = AveragedMap::from_reflected_resolvent(src, alpha).map_err(wrap(at("alpha")))?;
            Ok((map, Vector::zeros(dim)))
        }
    }
}

/// The set in a projection factor, when there is one.
pub fn factor_set(f: &FactorSpec) -> Option<&ConvexSet> {
    match &f.kind {
        FactorKind::Projection { set } => Some(set),
        _ => None,
    }
}
