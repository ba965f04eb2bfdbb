use nalgebra::{DMatrix, Dyn, SymmetricEigen, LU};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::sampling::random_vector;
use super::vector::Vector;
use crate::error::{Error, Result};

/// Tolerance on the smallest eigenvalue of the symmetric part.
pub const PSD_TOL: f64 = 1e-10;
/// Default stand-in for the (unbounded) cocoercivity constant of the zero operator.
pub const DEFAULT_ZERO_CAP: f64 = 1e6;

const SYMMETRY_TOL: f64 = 1e-12;
const BETA_CHECK_PAIRS: usize = 256;
const BETA_CHECK_SLACK: f64 = 1e-9;
const BETA_CHECK_SEED: u64 = 0xC0C0_E21E;

#[derive(Clone, Debug, PartialEq)]
pub enum MonotoneKind {
    /// `A x = M x`
    Linear { matrix: DMatrix<f64> },
    /// `A x = Q x + q`, the gradient of `½⟨x, Qx⟩ + ⟨q, x⟩`.
    QuadraticGradient { hessian: DMatrix<f64>, shift: Vector },
}

/// Single-valued monotone operator with an exact resolvent.
#[derive(Clone, Debug)]
pub struct MonotoneSource {
    kind: MonotoneKind,
    beta: Option<f64>,
    // LU factors of I + M (or I + Q), computed once.
    shifted_lu: LU<f64, Dyn, Dyn>,
}

impl PartialEq for MonotoneSource {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.beta == other.beta
    }
}

impl MonotoneSource {
    pub fn linear(matrix: DMatrix<f64>) -> Result<Self> {
        Self::build(MonotoneKind::Linear { matrix }, None)
    }

    pub fn quadratic_gradient(hessian: DMatrix<f64>, shift: Vector) -> Result<Self> {
        shift.check_dim(hessian.nrows())?;
        let src = Self::build(MonotoneKind::QuadraticGradient { hessian, shift }, None)?;
        if !src.is_symmetric() {
            return Err(Error::invalid("quadratic hessian must be symmetric"));
        }
        Ok(src)
    }

    /// Attaches a user-asserted cocoercivity constant, sample-checked on
    /// seeded pairs.
    pub fn with_beta(mut self, beta: f64) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::invalid("cocoercivity constant must be positive"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(BETA_CHECK_SEED);
        let dim = self.dim();
        for _ in 0..BETA_CHECK_PAIRS {
            let x = random_vector(&mut rng, dim, 1.0);
            let y = random_vector(&mut rng, dim, 1.0);
            let diff = &self.apply_unchecked(&x) - &self.apply_unchecked(&y);
            let lhs = (&x - &y).dot(&diff);
            let rhs = beta * diff.norm_squared();
            if lhs < rhs - BETA_CHECK_SLACK {
                return Err(Error::Contract(format!(
                    "asserted cocoercivity constant {beta} fails on a sampled pair ({lhs} < {rhs})"
                )));
            }
        }
        self.beta = Some(beta);
        Ok(self)
    }

    fn build(kind: MonotoneKind, beta: Option<f64>) -> Result<Self> {
        let m = match &kind {
            MonotoneKind::Linear { matrix } => matrix,
            MonotoneKind::QuadraticGradient { hessian, .. } => hessian,
        };
        if m.nrows() != m.ncols() || m.nrows() == 0 {
            return Err(Error::invalid("operator matrix must be square and nonempty"));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("operator matrix has non-finite entries"));
        }
        let sym = (m + m.transpose()) * 0.5;
        let min_eig = SymmetricEigen::new(sym).eigenvalues.min();
        if min_eig < -PSD_TOL {
            return Err(Error::Contract(format!(
                "symmetric part is not positive semidefinite (smallest eigenvalue {min_eig})"
            )));
        }
        let n = m.nrows();
        let shifted_lu = (DMatrix::identity(n, n) + m).lu();
        Ok(MonotoneSource {
            kind,
            beta,
            shifted_lu,
        })
    }

    pub fn kind(&self) -> &MonotoneKind {
        &self.kind
    }

    pub fn beta(&self) -> Option<f64> {
        self.beta
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        match &self.kind {
            MonotoneKind::Linear { matrix } => matrix,
            MonotoneKind::QuadraticGradient { hessian, .. } => hessian,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix().nrows()
    }

    pub fn is_symmetric(&self) -> bool {
        let m = self.matrix();
        let scale = m.amax().max(1.0);
        (m - m.transpose()).amax() <= SYMMETRY_TOL * scale
    }

    /// Evaluates the operator itself.
    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        x.check_dim(self.dim())?;
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &Vector) -> Vector {
        match &self.kind {
            MonotoneKind::Linear { matrix } => Vector::from_dvector(matrix * x.as_dvector()),
            MonotoneKind::QuadraticGradient { hessian, shift } => {
                Vector::from_dvector(hessian * x.as_dvector() + shift.as_dvector())
            }
        }
    }

    /// `J_A x`: the unique `y` with `y + A y = x`.
    pub fn resolvent(&self, x: &Vector) -> Result<Vector> {
        x.check_dim(self.dim())?;
        self.resolvent_unchecked(x)
    }

    pub(crate) fn resolvent_unchecked(&self, x: &Vector) -> Result<Vector> {
        let rhs = match &self.kind {
            MonotoneKind::Linear { .. } => x.as_dvector().clone(),
            MonotoneKind::QuadraticGradient { shift, .. } => x.as_dvector() - shift.as_dvector(),
        };
        self.shifted_lu
            .solve(&rhs)
            .map(Vector::from_dvector)
            .ok_or_else(|| Error::Internal("I + A is singular for a monotone A".into()))
    }

    /// `R_A x = 2 J_A x − x`.
    pub fn reflected_resolvent(&self, x: &Vector) -> Result<Vector> {
        x.check_dim(self.dim())?;
        self.reflected_resolvent_unchecked(x)
    }

    pub(crate) fn reflected_resolvent_unchecked(&self, x: &Vector) -> Result<Vector> {
        Ok(self.resolvent_unchecked(x)?.lincomb(2.0, x, -1.0))
    }

    /// `x − J_A x`, the resolvent of the inverse operator.
    pub fn inverse_resolvent(&self, x: &Vector) -> Result<Vector> {
        Ok(x - &self.resolvent(x)?)
    }

    /// `1/λ_max` of the symmetric matrix, or `cap` for the zero operator.
    pub fn cocoercivity_constant_with_cap(&self, cap: f64) -> Result<f64> {
        if !(cap.is_finite() && cap > 0.0) {
            return Err(Error::invalid("zero-operator cap must be positive"));
        }
        if !self.is_symmetric() {
            return Err(Error::Unsupported(
                "cocoercivity certificates are only computed for symmetric operators".into(),
            ));
        }
        let lambda_max = SymmetricEigen::new(self.matrix().clone()).eigenvalues.max();
        if lambda_max <= 1.0 / cap {
            Ok(cap)
        } else {
            Ok(1.0 / lambda_max)
        }
    }

    pub fn cocoercivity_constant(&self) -> Result<f64> {
        self.cocoercivity_constant_with_cap(DEFAULT_ZERO_CAP)
    }
}
