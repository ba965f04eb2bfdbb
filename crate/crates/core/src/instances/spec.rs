//! The JSON file format. Parsing happens in two stages so that kind-specific
//! parameter errors still report their full path.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::operators::ConvexSet;
use crate::rates::BoundFn;

/// A positive number or `"auto"`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub enum Param {
    #[default]
    Auto,
    Value(f64),
}

impl Serialize for Param {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Param::Auto => s.serialize_str("auto"),
            Param::Value(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for Param {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Param::Value(v)),
            Raw::Str(s) if s == "auto" => Ok(Param::Auto),
            Raw::Str(s) => Err(serde::de::Error::custom(format!(
                "expected a number or \"auto\", got \"{s}\""
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FactorKind {
    /// `(1 − α)x + α·P_C x`
    Projection { set: ConvexSet },
    /// `(1 − α)x + α·scale·rot_θ x`
    RotationAvg { theta: f64, scale: f64 },
    /// The reflected resolvent of `x ↦ Mx`, as an `α`-averaged map.
    LinearResolvent { matrix: Vec<Vec<f64>>, beta: Param },
    /// `(1 − α)x + α·Mx` with `‖M‖ ≤ 1`.
    AveragedLinear { matrix: Vec<Vec<f64>> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct FactorSpec {
    pub alpha: f64,
    pub kind: FactorKind,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Metadata {
    pub k_justification: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub common_fixed_point: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub notes: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InstanceSpec {
    pub id: String,
    pub dim: usize,
    pub factors: Vec<FactorSpec>,
    pub x0: Vec<f64>,
    #[serde(rename = "K")]
    pub k: BoundFn,
    pub b: Param,
    pub d: Param,
    pub eps_grid: Vec<f64>,
    pub metadata: Metadata,
}

#[derive(Deserialize, Serialize, Clone, Copy)]
#[serde(rename_all = "snake_case")]
enum KindName {
    Projection,
    RotationAvg,
    LinearResolvent,
    AveragedLinear,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RawFactor {
    alpha: f64,
    kind: KindName,
    #[serde(default)]
    params: Value,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    id: String,
    dim: usize,
    factors: Vec<RawFactor>,
    x0: Vec<f64>,
    #[serde(rename = "K")]
    k: BoundFn,
    b: Param,
    d: Param,
    eps_grid: Vec<f64>,
    metadata: Metadata,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProjectionParams {
    set: ConvexSet,
}

fn one() -> f64 {
    1.0
}

fn is_one(v: &f64) -> bool {
    *v == 1.0
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct RotationParams {
    theta: f64,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    scale: f64,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct ResolventParams {
    matrix: Vec<Vec<f64>>,
    #[serde(default)]
    beta: Param,
}

#[derive(Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
struct LinearParams {
    matrix: Vec<Vec<f64>>,
}

fn parse_err<E: std::fmt::Display>(prefix: &str, e: serde_path_to_error::Error<E>) -> Error {
    let inner = e.path().to_string();
    let path = match (prefix.is_empty(), inner.as_str()) {
        (true, _) => inner.clone(),
        (false, ".") => prefix.to_string(),
        (false, _) => format!("{prefix}.{inner}"),
    };
    Error::Parse {
        path,
        message: e.into_inner().to_string(),
    }
}

fn from_value<T: DeserializeOwned>(v: Value, prefix: &str) -> Result<T> {
    serde_path_to_error::deserialize(v).map_err(|e| parse_err(prefix, e))
}

impl FactorSpec {
    fn from_raw(raw: RawFactor, i: usize) -> Result<Self> {
        let at = format!("factors[{i}].params");
        let kind = match raw.kind {
            KindName::Projection => {
                let p: ProjectionParams = from_value(raw.params, &at)?;
                FactorKind::Projection { set: p.set }
            }
            KindName::RotationAvg => {
                let p: RotationParams = from_value(raw.params, &at)?;
                FactorKind::RotationAvg {
                    theta: p.theta,
                    scale: p.scale,
                }
            }
            KindName::LinearResolvent => {
                let p: ResolventParams = from_value(raw.params, &at)?;
                FactorKind::LinearResolvent {
                    matrix: p.matrix,
                    beta: p.beta,
                }
            }
            KindName::AveragedLinear => {
                let p: LinearParams = from_value(raw.params, &at)?;
                FactorKind::AveragedLinear { matrix: p.matrix }
            }
        };
        Ok(FactorSpec { alpha: raw.alpha, kind })
    }

    fn to_raw(&self) -> RawFactor {
        let to = |v: std::result::Result<Value, serde_json::Error>| v.expect("params serialize");
        let (kind, params) = match &self.kind {
            FactorKind::Projection { set } => (
                KindName::Projection,
                serde_json::json!({ "set": to(serde_json::to_value(set)) }),
            ),
            FactorKind::RotationAvg { theta, scale } => (
                KindName::RotationAvg,
                to(serde_json::to_value(RotationParams {
                    theta: *theta,
                    scale: *scale,
                })),
            ),
            FactorKind::LinearResolvent { matrix, beta } => (
                KindName::LinearResolvent,
                to(serde_json::to_value(ResolventParams {
                    matrix: matrix.clone(),
                    beta: *beta,
                })),
            ),
            FactorKind::AveragedLinear { matrix } => (
                KindName::AveragedLinear,
                to(serde_json::to_value(LinearParams { matrix: matrix.clone() })),
            ),
        };
        RawFactor {
            alpha: self.alpha,
            kind,
            params,
        }
    }
}

impl Serialize for FactorSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_raw().serialize(s)
    }
}

impl InstanceSpec {
    /// Schema-level parse; invariants are checked by `Instance::from_spec`.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawInstance = serde_path_to_error::deserialize(de).map_err(|e| parse_err("", e))?;
        let factors = raw
            .factors
            .into_iter()
            .enumerate()
            .map(|(i, f)| FactorSpec::from_raw(f, i))
            .collect::<Result<Vec<_>>>()?;
        Ok(InstanceSpec {
            id: raw.id,
            dim: raw.dim,
            factors,
            x0: raw.x0,
            k: raw.k,
            b: raw.b,
            d: raw.d,
            eps_grid: raw.eps_grid,
            metadata: raw.metadata,
        })
    }

    /// Pretty-printed JSON with a trailing newline.
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instance specs always serialize");
        s.push('\n');
        s
    }
}
