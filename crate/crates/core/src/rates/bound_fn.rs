use rug::Float;
use serde::{Deserialize, Serialize};

use super::enclosure::Enclosure;
use crate::error::{Error, Result};

/// Something that can bound a positive function from above over an
/// enclosed argument.
pub trait UpperBound {
    /// A value `≥ f(t)` for every `t` in `arg`.
    fn upper_over(&self, arg: &Enclosure) -> Result<Float>;
}

/// Positive nonincreasing function `(0, ∞) → (0, ∞)`: the approximate
/// fixed point bound `K` and the `afp` argument of the rate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum BoundFn {
    Constant {
        value: f64,
    },
    /// `ε ↦ c0 + c·ε^(−k)`
    InversePower {
        c0: f64,
        c: f64,
        k: f64,
    },
    /// `ε ↦ vᵢ` for the largest `εᵢ ≤ ε`; undefined below the first entry.
    #[serde(rename = "table")]
    StepTable {
        points: Vec<(f64, f64)>,
    },
}

impl BoundFn {
    pub fn constant(value: f64) -> Result<Self> {
        let f = BoundFn::Constant { value };
        f.validate()?;
        Ok(f)
    }

    pub fn inverse_power(c0: f64, c: f64, k: f64) -> Result<Self> {
        let f = BoundFn::InversePower { c0, c, k };
        f.validate()?;
        Ok(f)
    }

    pub fn step_table(points: Vec<(f64, f64)>) -> Result<Self> {
        let f = BoundFn::StepTable { points };
        f.validate()?;
        Ok(f)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        match self {
            BoundFn::Constant { value } => {
                if !positive(*value) {
                    return Err(Error::invalid("constant bound must be positive"));
                }
            }
            BoundFn::InversePower { c0, c, k } => {
                if !(c0.is_finite() && *c0 >= 0.0) || !positive(*c) || !(k.is_finite() && *k >= 0.0) {
                    return Err(Error::invalid(
                        "inverse-power bound needs c0 ≥ 0, c > 0 and k ≥ 0",
                    ));
                }
            }
            BoundFn::StepTable { points } => {
                if points.is_empty() {
                    return Err(Error::invalid("step table must not be empty"));
                }
                for (i, (e, v)) in points.iter().enumerate() {
                    if !positive(*e) || !positive(*v) {
                        return Err(Error::invalid(format!("step table entry {i} must be positive")));
                    }
                }
                for w in points.windows(2) {
                    if w[1].0 <= w[0].0 {
                        return Err(Error::invalid("step table arguments must be strictly increasing"));
                    }
                    if w[1].1 > w[0].1 {
                        return Err(Error::invalid("step table values must be nonincreasing"));
                    }
                }
            }
        }
        Ok(())
    }

    /// Plain machine-float evaluation.
    pub fn eval(&self, eps: f64) -> Result<f64> {
        if !(eps.is_finite() && eps > 0.0) {
            return Err(Error::invalid("bound functions are defined on (0, ∞)"));
        }
        match self {
            BoundFn::Constant { value } => Ok(*value),
            BoundFn::InversePower { c0, c, k } => Ok(c0 + c * eps.powf(-k)),
            BoundFn::StepTable { points } => points
                .iter()
                .rev()
                .find(|(e, _)| *e <= eps)
                .map(|(_, v)| *v)
                .ok_or_else(|| Error::BoundDomain {
                    at: eps.to_string(),
                    reason: format!("below the first table argument {}", points[0].0),
                }),
        }
    }
}

impl UpperBound for BoundFn {
    fn upper_over(&self, arg: &Enclosure) -> Result<Float> {
        if !(*arg.lo() > 0) {
            return Err(Error::BoundDomain {
                at: arg.to_string(),
                reason: "argument must be positive".into(),
            });
        }
        let prec = arg.prec();
        match self {
            BoundFn::Constant { value } => Ok(Float::with_val(prec, *value)),
            BoundFn::InversePower { c0, c, k } => {
                let v = Enclosure::point(prec, *c0)
                    .add(&Enclosure::point(prec, *c).mul(&arg.pow_neg(*k)?));
                Ok(v.hi().clone())
            }
            BoundFn::StepTable { points } => {
                // nonincreasing: the supremum over the enclosure sits at its lower end
                points
                    .iter()
                    .rev()
                    .find(|(e, _)| *arg.lo() >= *e)
                    .map(|(_, v)| Float::with_val(prec, *v))
                    .ok_or_else(|| Error::BoundDomain {
                        at: arg.to_string(),
                        reason: format!("below the first table argument {}", points[0].0),
                    })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation() {
        assert_eq!(BoundFn::constant(2.0).unwrap().eval(0.1).unwrap(), 2.0);
        let p = BoundFn::inverse_power(1.0, 2.0, 1.0).unwrap();
        assert_eq!(p.eval(0.5).unwrap(), 5.0);
        let t = BoundFn::step_table(vec![(0.1, 5.0), (1.0, 2.0)]).unwrap();
        assert_eq!(t.eval(0.5).unwrap(), 5.0);
        assert_eq!(t.eval(1.0).unwrap(), 2.0);
        assert_eq!(t.eval(10.0).unwrap(), 2.0);
        assert!(matches!(t.eval(0.01), Err(Error::BoundDomain { .. })));
    }

    #[test]
    fn enclosure_upper_bounds() {
        let t = BoundFn::step_table(vec![(0.1, 5.0), (1.0, 2.0)]).unwrap();
        let lo = Enclosure::point(128, 0.9).max(&Enclosure::point(128, 0.9));
        let arg = Enclosure::point(128, 1.0).sub(&Enclosure::point(128, 0.1)).max(&lo);
        assert_eq!(t.upper_over(&arg).unwrap(), 5.0);
        let p = BoundFn::inverse_power(0.0, 1.0, 2.0).unwrap();
        let third = Enclosure::point(128, 1.0).div(&Enclosure::point(128, 3.0)).unwrap();
        let up = p.upper_over(&third).unwrap();
        assert!(up >= 9.0);
        assert!(up.to_f64() - 9.0 < 1e-30);
    }

    #[test]
    fn invalid_forms() {
        assert!(BoundFn::constant(0.0).is_err());
        assert!(BoundFn::inverse_power(1.0, 0.0, 1.0).is_err());
        assert!(BoundFn::inverse_power(1.0, 1.0, -1.0).is_err());
        assert!(BoundFn::step_table(vec![(1.0, 1.0), (0.5, 1.0)]).is_err());
        assert!(BoundFn::step_table(vec![(0.5, 1.0), (1.0, 2.0)]).is_err());
        assert!(BoundFn::step_table(vec![]).is_err());
    }

    #[test]
    fn serde_forms() {
        let t: BoundFn = serde_json::from_str(r#"{"form":"table","points":[[0.1,5],[1,2]]}"#).unwrap();
        assert_eq!(t, BoundFn::step_table(vec![(0.1, 5.0), (1.0, 2.0)]).unwrap());
        let c: BoundFn = serde_json::from_str(r#"{"form":"constant","value":1}"#).unwrap();
        assert_eq!(c, BoundFn::Constant { value: 1.0 });
        let p: BoundFn = serde_json::from_str(r#"{"form":"inverse_power","c0":1,"c":2,"k":0.5}"#).unwrap();
        assert_eq!(p, BoundFn::InversePower { c0: 1.0, c: 2.0, k: 0.5 });
    }
}
