use serde::Serialize;

use crate::error::{Error, Result};
use crate::operators::{AveragedMap, Vector};

/// Displacements `‖xₙ − xₙ₊₁‖` along `xₙ₊₁ = R xₙ`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub displacements: Vec<f64>,
    /// Iterates `x₀, …, x_len`, kept only on request.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vector>>,
    pub start: Vector,
    /// Requested number of steps; `displacements` is shorter after an early stop.
    pub steps: usize,
}

impl Trajectory {
    /// Smallest `n` with `displacements[n] ≤ eps`.
    pub fn first_hit(&self, eps: f64) -> Option<usize> {
        self.displacements.iter().position(|d| *d <= eps)
    }

    /// Largest increase `disp(n+1) − disp(n)`, or 0.
    pub fn max_increase(&self) -> f64 {
        self.displacements
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }
}

/// Outcome of a first-hit search over `[0, cap)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Hit {
    Hit(u64),
    Exceeded(u64),
}

/// Iterates `map` from `x0`. Stops after `steps` displacements, or at the first
/// displacement `≤ stop_eps`.
pub fn run_picard(map: &AveragedMap, x0: &Vector, steps: usize, stop_eps: Option<f64>) -> Result<Trajectory> {
    iterate(map, x0, steps, stop_eps, false)
}

/// [`run_picard`] that also keeps every iterate.
pub fn run_picard_keep(map: &AveragedMap, x0: &Vector, steps: usize, stop_eps: Option<f64>) -> Result<Trajectory> {
    iterate(map, x0, steps, stop_eps, true)
}

fn iterate(map: &AveragedMap, x0: &Vector, steps: usize, stop_eps: Option<f64>, keep: bool) -> Result<Trajectory> {
    if steps == 0 {
        return Err(Error::invalid("steps must be at least 1"));
    }
    if let Some(e) = stop_eps {
        if !(e.is_finite() && e > 0.0) {
            return Err(Error::invalid("stop_eps must be positive"));
        }
    }
    x0.check_dim(map.dim())?;
    let mut displacements = Vec::with_capacity(steps.min(1 << 16));
    let mut points = keep.then(|| vec![x0.clone()]);
    let mut x = x0.clone();
    for n in 0..steps {
        let next = map.eval_unchecked(&x)?;
        if !next.is_finite() {
            return Err(Error::NonFinite { step: n + 1 });
        }
        let disp = x.distance(&next);
        displacements.push(disp);
        if let Some(p) = points.as_mut() {
            p.push(next.clone());
        }
        x = next;
        if stop_eps.is_some_and(|e| disp <= e) {
            break;
        }
    }
    Ok(Trajectory {
        displacements,
        points,
        start: x0.clone(),
        steps,
    })
}

/// Smallest `n < cap` with `‖Rⁿx₀ − Rⁿ⁺¹x₀‖ ≤ eps`.
pub fn first_hit_index(map: &AveragedMap, x0: &Vector, eps: f64, cap: u64) -> Result<Hit> {
    if cap == 0 {
        return Err(Error::invalid("cap must be at least 1"));
    }
    if !(eps.is_finite() && eps > 0.0) {
        return Err(Error::invalid("eps must be positive"));
    }
    x0.check_dim(map.dim())?;
    let mut x = x0.clone();
    for n in 0..cap {
        let next = map.eval_unchecked(&x)?;
        if !next.is_finite() {
            return Err(Error::NonFinite { step: n as usize + 1 });
        }
        if x.distance(&next) <= eps {
            return Ok(Hit::Hit(n));
        }
        x = next;
    }
    Ok(Hit::Exceeded(cap))
}
