use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::monotone::MonotoneSource;
use super::sampling::random_vector;
use super::sets::ConvexSet;
use super::vector::Vector;
use crate::error::{Error, Result};
use crate::rates::star_many_f64;

/// Tolerance on the operator norm of linear parts.
pub const LINEAR_NORM_TOL: f64 = 1e-12;

/// Settings for the statistical nonexpansiveness check run when a map's
/// contract cannot be read off its parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContractCheck {
    pub pairs: usize,
    pub slack: f64,
    pub seed: u64,
    /// Largest sampled norm.
    pub scale: f64,
}

impl Default for ContractCheck {
    fn default() -> Self {
        ContractCheck {
            pairs: 256,
            slack: 1e-9,
            seed: 0x5EED_0A7E,
            scale: 10.0,
        }
    }
}

/// A map `T` with `‖Tx − Ty‖ ≤ ‖x − y‖`.
#[derive(Clone, Debug)]
pub enum NonexpansiveMap {
    Identity { dim: usize },
    Negation { dim: usize },
    Projection(ConvexSet),
    Linear(DMatrix<f64>),
    /// Rotation by `theta` on each coordinate pair `(2i, 2i+1)`, scaled by
    /// `scale ∈ [0, 1]`. A trailing odd coordinate is only scaled.
    Rotation { dim: usize, theta: f64, scale: f64 },
    /// `x ↦ Lx + shift` with `‖L‖ ≤ 1`.
    Affine { linear: DMatrix<f64>, shift: Vector },
    ReflectedResolvent(MonotoneSource),
    Averaged(Box<AveragedMap>),
    /// Applied in order, first element first.
    Composition(Vec<NonexpansiveMap>),
    /// `x ↦ x + (base(x) − x)/alpha`, the nonexpansive part of an
    /// `alpha`-averaged `base`.
    Residual { base: Box<NonexpansiveMap>, alpha: f64 },
}

impl NonexpansiveMap {
    pub fn identity(dim: usize) -> Self {
        NonexpansiveMap::Identity { dim }
    }

    pub fn negation(dim: usize) -> Self {
        NonexpansiveMap::Negation { dim }
    }

    pub fn projection(set: ConvexSet) -> Result<Self> {
        set.validate()?;
        Ok(NonexpansiveMap::Projection(set))
    }

    pub fn linear(matrix: DMatrix<f64>) -> Result<Self> {
        check_linear_part(&matrix)?;
        Ok(NonexpansiveMap::Linear(matrix))
    }

    pub fn rotation(dim: usize, theta: f64, scale: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("rotation dimension must be positive"));
        }
        if !theta.is_finite() {
            return Err(Error::invalid("rotation angle must be finite"));
        }
        if !(0.0..=1.0).contains(&scale) {
            return Err(Error::invalid("rotation scale must lie in [0, 1]"));
        }
        Ok(NonexpansiveMap::Rotation { dim, theta, scale })
    }

    pub fn affine(linear: DMatrix<f64>, shift: Vector) -> Result<Self> {
        check_linear_part(&linear)?;
        shift.check_dim(linear.nrows())?;
        Ok(NonexpansiveMap::Affine { linear, shift })
    }

    pub fn reflected_resolvent(src: MonotoneSource) -> Self {
        NonexpansiveMap::ReflectedResolvent(src)
    }

    pub fn composition(maps: Vec<NonexpansiveMap>) -> Result<Self> {
        let dim = maps
            .first()
            .ok_or_else(|| Error::invalid("composition needs at least one map"))?
            .dim();
        for m in &maps {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: m.dim(),
                });
            }
        }
        Ok(NonexpansiveMap::Composition(maps))
    }

    /// Builds the nonexpansive part of `base` viewed as `alpha`-averaged and
    /// sample-checks its contract.
    pub fn residual(base: NonexpansiveMap, alpha: f64, check: &ContractCheck) -> Result<Self> {
        check_alpha(alpha)?;
        let map = NonexpansiveMap::Residual {
            base: Box::new(base),
            alpha,
        };
        map.check_contract(check)?;
        Ok(map)
    }

    pub fn dim(&self) -> usize {
        match self {
            NonexpansiveMap::Identity { dim }
            | NonexpansiveMap::Negation { dim }
            | NonexpansiveMap::Rotation { dim, .. } => *dim,
            NonexpansiveMap::Projection(set) => set.dim(),
            NonexpansiveMap::Linear(m) | NonexpansiveMap::Affine { linear: m, .. } => m.nrows(),
            NonexpansiveMap::ReflectedResolvent(src) => src.dim(),
            NonexpansiveMap::Averaged(map) => map.dim(),
            NonexpansiveMap::Composition(maps) => maps[0].dim(),
            NonexpansiveMap::Residual { base, .. } => base.dim(),
        }
    }

    pub fn eval(&self, x: &Vector) -> Result<Vector> {
        x.check_dim(self.dim())?;
        self.eval_unchecked(x)
    }

    pub(crate) fn eval_unchecked(&self, x: &Vector) -> Result<Vector> {
        Ok(match self {
            NonexpansiveMap::Identity { .. } => x.clone(),
            NonexpansiveMap::Negation { .. } => -x,
            NonexpansiveMap::Projection(set) => set.project_unchecked(x),
            NonexpansiveMap::Linear(m) => Vector::from_dvector(m * x.as_dvector()),
            NonexpansiveMap::Rotation { theta, scale, .. } => rotate(x, *theta, *scale),
            NonexpansiveMap::Affine { linear, shift } => {
                Vector::from_dvector(linear * x.as_dvector() + shift.as_dvector())
            }
            NonexpansiveMap::ReflectedResolvent(src) => src.reflected_resolvent_unchecked(x)?,
            NonexpansiveMap::Averaged(map) => map.eval_unchecked(x)?,
            NonexpansiveMap::Composition(maps) => {
                let mut y = x.clone();
                for m in maps {
                    y = m.eval_unchecked(&y)?;
                }
                y
            }
            NonexpansiveMap::Residual { base, alpha } => {
                let step = &base.eval_unchecked(x)? - x;
                x.lincomb(1.0, &step, 1.0 / alpha)
            }
        })
    }

    /// Statistical check of `‖Tx − Ty‖ ≤ ‖x − y‖ + slack` on seeded pairs.
    pub fn check_contract(&self, check: &ContractCheck) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(check.seed);
        let dim = self.dim();
        for _ in 0..check.pairs {
            let x = random_vector(&mut rng, dim, check.scale);
            let y = random_vector(&mut rng, dim, check.scale);
            let lhs = self.eval_unchecked(&x)?.distance(&self.eval_unchecked(&y)?);
            let rhs = x.distance(&y);
            if lhs > rhs + check.slack {
                return Err(Error::Contract(format!(
                    "map expands a sampled pair: {lhs} > {rhs}"
                )));
            }
        }
        Ok(())
    }
}

fn check_linear_part(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() || m.nrows() == 0 {
        return Err(Error::invalid("linear part must be square and nonempty"));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::invalid("linear part has non-finite entries"));
    }
    let norm = m.clone().singular_values().max();
    if norm > 1.0 + LINEAR_NORM_TOL {
        return Err(Error::Contract(format!(
            "linear part has operator norm {norm} > 1"
        )));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "averagedness parameter {alpha} must lie strictly inside (0, 1)"
        )))
    }
}

fn rotate(x: &Vector, theta: f64, scale: f64) -> Vector {
    let (s, c) = theta.sin_cos();
    let src = x.as_slice();
    let mut out = vec![0.0; src.len()];
    for (o, i) in out.chunks_mut(2).zip(src.chunks(2)) {
        if let [a, b] = i {
            o[0] = scale * (c * a - s * b);
            o[1] = scale * (s * a + c * b);
        } else {
            o[0] = scale * i[0];
        }
    }
    Vector::from_dvector(nalgebra::DVector::from_vec(out))
}

/// `R = (1 − alpha)·id + alpha·T` with `T` nonexpansive and `alpha ∈ (0, 1)`.
#[derive(Clone, Debug)]
pub struct AveragedMap {
    alpha: f64,
    inner: NonexpansiveMap,
}

impl AveragedMap {
    pub fn new(alpha: f64, inner: NonexpansiveMap) -> Result<Self> {
        check_alpha(alpha)?;
        Ok(AveragedMap { alpha, inner })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn inner(&self) -> &NonexpansiveMap {
        &self.inner
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn eval(&self, x: &Vector) -> Result<Vector> {
        x.check_dim(self.dim())?;
        self.eval_unchecked(x)
    }

    pub(crate) fn eval_unchecked(&self, x: &Vector) -> Result<Vector> {
        // (1 − α)x + α(x + (Bx − x)/α) is Bx; skip the round trip
        if let NonexpansiveMap::Residual { base, alpha } = &self.inner {
            if *alpha == self.alpha {
                return base.eval_unchecked(x);
            }
        }
        let tx = self.inner.eval_unchecked(x)?;
        Ok(x.lincomb(1.0 - self.alpha, &tx, self.alpha))
    }

    /// The `T` in `R = (1 − α)·id + α·T`.
    pub fn nonexpansive_part(&self) -> NonexpansiveMap {
        self.inner.clone()
    }

    /// The metric projection onto `set` as a firmly nonexpansive map:
    /// `α = 1/2` with inner map the reflection `2P − id`.
    pub fn projection(set: ConvexSet) -> Result<Self> {
        let base = NonexpansiveMap::projection(set)?;
        let inner = NonexpansiveMap::residual(base, 0.5, &ContractCheck::default())?;
        AveragedMap::new(0.5, inner)
    }

    /// `R_A` as an `alpha`-averaged map. Valid whenever `alpha ≥ (1 + β)⁻¹`
    /// for a cocoercivity constant `β` of `src`; the extracted nonexpansive
    /// part is sample-checked.
    pub fn from_reflected_resolvent(src: MonotoneSource, alpha: f64) -> Result<Self> {
        let base = NonexpansiveMap::reflected_resolvent(src);
        let inner = NonexpansiveMap::residual(base, alpha, &ContractCheck::default())?;
        AveragedMap::new(alpha, inner)
    }
}

/// `R_A` for a `beta`-cocoercive `A`, which is `(1 + beta)⁻¹`-averaged.
pub fn averaged_from_cocoercive(src: MonotoneSource, beta: f64) -> Result<AveragedMap> {
    if !(beta.is_finite() && beta > 0.0) {
        return Err(Error::invalid("cocoercivity constant must be positive"));
    }
    AveragedMap::from_reflected_resolvent(src, 1.0 / (1.0 + beta))
}

/// Composes averaged maps (first element applied first). The result carries
/// the ⋆-combined parameter and the extracted nonexpansive part of the literal
/// composition.
pub fn compose(maps: &[AveragedMap]) -> Result<AveragedMap> {
    if maps.len() < 2 {
        return Err(Error::invalid("composition needs at least two averaged maps"));
    }
    let alphas: Vec<f64> = maps.iter().map(AveragedMap::alpha).collect();
    let alpha = star_many_f64(&alphas)?;
    let base = NonexpansiveMap::composition(
        maps.iter()
            .map(|m| NonexpansiveMap::Averaged(Box::new(m.clone())))
            .collect(),
    )?;
    let inner = NonexpansiveMap::residual(base, alpha, &ContractCheck::default())?;
    AveragedMap::new(alpha, inner)
}
