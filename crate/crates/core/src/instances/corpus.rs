use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, FRAC_PI_4, PI};

use super::spec::{FactorKind, FactorSpec, InstanceSpec, Metadata, Param};
use super::Instance;
use crate::operators::{ConvexSet, Vector};
use crate::rates::BoundFn;

const GRID: [f64; 3] = [1.0, 0.1, 0.01];

fn v(e: &[f64]) -> Vector {
    Vector::new(e.to_vec()).expect("corpus vectors are finite")
}

fn e(dim: usize, i: usize, s: f64) -> Vector {
    Vector::basis(dim, i, s)
}

fn filled(dim: usize, s: f64) -> Vector {
    v(&vec![s; dim])
}

fn rot(alpha: f64, theta: f64, scale: f64) -> FactorSpec {
    FactorSpec {
        alpha,
        kind: FactorKind::RotationAvg { theta, scale },
    }
}

fn proj(alpha: f64, set: ConvexSet) -> FactorSpec {
    FactorSpec {
        alpha,
        kind: FactorKind::Projection { set },
    }
}

fn res(alpha: f64, matrix: Vec<Vec<f64>>, beta: Param) -> FactorSpec {
    FactorSpec {
        alpha,
        kind: FactorKind::LinearResolvent { matrix, beta },
    }
}

fn lin(alpha: f64, matrix: Vec<Vec<f64>>) -> FactorSpec {
    FactorSpec {
        alpha,
        kind: FactorKind::AveragedLinear { matrix },
    }
}

fn diag(d: &[f64]) -> Vec<Vec<f64>> {
    let n = d.len();
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { d[i] } else { 0.0 }).collect())
        .collect()
}

/// `tridiag(−1, 2, −1)`, symmetric positive definite with `λ_max < 4`.
fn laplacian(n: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match i.abs_diff(j) {
                    0 => 2.0,
                    1 => -1.0,
                    _ => 0.0,
                })
                .collect()
        })
        .collect()
}

/// `s` times the cyclic shift `eᵢ ↦ e_{i+1}`.
fn shift(n: usize, s: f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == (j + 1) % n { s } else { 0.0 }).collect())
        .collect()
}

fn halfspace(normal: Vector, offset: f64) -> ConvexSet {
    ConvexSet::halfspace(normal, offset).expect("valid corpus halfspace")
}

fn ball(center: Vector, radius: f64) -> ConvexSet {
    ConvexSet::ball(center, radius).expect("valid corpus ball")
}

fn boxed(lower: Vector, upper: Vector) -> ConvexSet {
    ConvexSet::boxed(lower, upper).expect("valid corpus box")
}

fn affine(basis: Vec<Vector>, anchor: Vector) -> ConvexSet {
    ConvexSet::affine(basis, anchor).expect("valid corpus affine set")
}

fn constant(k: f64) -> BoundFn {
    BoundFn::constant(k).expect("positive")
}

struct Draft {
    id: &'static str,
    dim: usize,
    factors: Vec<FactorSpec>,
    x0: Vec<f64>,
    k: BoundFn,
    b: Param,
    d: Param,
    why: &'static str,
    fixed: Option<Vec<f64>>,
}

impl Draft {
    fn new(id: &'static str, dim: usize, factors: Vec<FactorSpec>, x0: Vector) -> Self {
        Draft {
            id,
            dim,
            factors,
            x0: x0.to_vec(),
            k: constant(1.0),
            b: Param::Auto,
            d: Param::Auto,
            why: "0 is a common fixed point of all factors; K ≡ 1 dominates its norm",
            fixed: Some(vec![0.0; dim]),
        }
    }

    fn k(mut self, k: BoundFn, why: &'static str) -> Self {
        self.k = k;
        self.why = why;
        self
    }

    fn fixed(mut self, p: Option<Vec<f64>>) -> Self {
        self.fixed = p;
        self
    }

    fn bd(mut self, b: f64, d: f64) -> Self {
        self.b = Param::Value(b);
        self.d = Param::Value(d);
        self
    }

    fn spec(self) -> InstanceSpec {
        InstanceSpec {
            id: self.id.into(),
            dim: self.dim,
            factors: self.factors,
            x0: self.x0,
            k: self.k,
            b: self.b,
            d: self.d,
            eps_grid: GRID.to_vec(),
            metadata: Metadata {
                k_justification: self.why.into(),
                common_fixed_point: self.fixed,
                notes: None,
            },
        }
    }
}

fn drafts() -> Vec<Draft> {
    vec![
        Draft::new(
            "rot2-quarter",
            2,
            vec![rot(0.5, FRAC_PI_2, 1.0), rot(0.5, 0.0, 1.0)],
            v(&[1.0, 0.0]),
        )
        .bd(1.0, 1.0),
        Draft::new(
            "identity-composition",
            2,
            vec![rot(0.5, 0.0, 1.0), rot(0.5, 0.0, 1.0)],
            v(&[1.0, 2.0]),
        ),
        Draft::new(
            "zero-map",
            2,
            vec![lin(0.5, diag(&[-1.0, -1.0])), rot(0.5, 0.0, 1.0)],
            v(&[3.0, 4.0]),
        ),
        Draft::new(
            "proj2-consistent",
            2,
            vec![
                proj(0.5, halfspace(v(&[1.0, 1.0]), 1.0)),
                proj(0.75, halfspace(v(&[1.0, -2.0]), 0.5)),
            ],
            v(&[4.0, 3.0]),
        ),
        Draft::new(
            "resolvent-diag",
            2,
            vec![
                res(2.0 / 3.0, diag(&[1.0, 2.0]), Param::Value(0.5)),
                res(2.0 / 3.0, diag(&[1.0, 2.0]), Param::Value(0.5)),
            ],
            v(&[2.0, -1.0]),
        ),
        Draft::new(
            "proj2-inconsistent-halfspaces",
            2,
            vec![
                proj(0.5, halfspace(v(&[1.0, 0.0]), 0.0)),
                proj(0.5, halfspace(v(&[-1.0, 0.0]), -1.0)),
            ],
            v(&[5.0, 3.0]),
        )
        .k(
            constant(1.0),
            "each halfspace is fixed by its factor; their points nearest 0 have norms 0 and 1",
        )
        .fixed(None),
        Draft::new(
            "proj2-inconsistent-balls",
            2,
            vec![
                proj(0.6, ball(v(&[-2.0, 0.0]), 1.0)),
                proj(0.4, ball(v(&[2.0, 0.0]), 1.0)),
            ],
            v(&[0.0, 3.0]),
        )
        .k(
            constant(1.0),
            "each ball is fixed by its factor; both contain a point of norm 1",
        )
        .fixed(None),
        Draft::new(
            "proj3-halfspaces-dim8",
            8,
            vec![
                proj(0.5, halfspace(e(8, 0, -1.0), -1.0)),
                proj(0.5, halfspace(e(8, 1, -1.0), -1.0)),
                proj(0.5, halfspace(filled(8, 1.0 / 8f64.sqrt()), 1.0)),
            ],
            v(&[-3.0, 2.0, 0.5, -1.0, 0.0, 1.0, 2.0, -2.0]),
        )
        .k(
            constant(1.0),
            "e₁ + e₂ lies in all three halfspaces; each halfspace has a point of norm at most 1",
        )
        .fixed(Some(e(8, 0, 1.0).lincomb(1.0, &e(8, 1, 1.0), 1.0).to_vec())),
        Draft::new(
            "proj3-mixed-dim8",
            8,
            vec![
                proj(0.3, ball(Vector::zeros(8), 2.0)),
                proj(0.5, boxed(filled(8, -1.0), filled(8, 1.0))),
                proj(0.7, affine((0..3).map(|i| e(8, i, 1.0)).collect(), Vector::zeros(8))),
            ],
            filled(8, 5.0),
        ),
        Draft::new(
            "proj4-consistent-dim16",
            16,
            vec![
                proj(0.5, halfspace(e(16, 0, 1.0), 1.0)),
                proj(0.6, ball(e(16, 1, 0.5), 3.0)),
                proj(0.7, boxed(filled(16, -2.0), filled(16, 2.0))),
                proj(0.8, affine((0..8).map(|i| e(16, i, 1.0)).collect(), Vector::zeros(16))),
            ],
            v(&(0..16).map(|i| if i % 2 == 0 { 4.0 } else { -4.0 }).collect::<Vec<_>>()),
        ),
        Draft::new(
            "proj4-inconsistent-dim16",
            16,
            vec![
                proj(0.5, ball(e(16, 0, 3.0), 1.0)),
                proj(0.5, ball(e(16, 0, -3.0), 1.0)),
                proj(0.5, boxed(filled(16, -1.0), filled(16, 1.0))),
                proj(0.5, halfspace(e(16, 1, 1.0), -1.0)),
            ],
            filled(16, 1.0),
        )
        .k(
            constant(2.0),
            "each set is fixed by its factor; the nearest points to 0 have norms 2, 2, 0 and 1",
        )
        .fixed(None),
        Draft::new(
            "rot3-dim8",
            8,
            vec![
                rot(0.5, FRAC_PI_3, 1.0),
                rot(0.3, FRAC_PI_2, 0.9),
                rot(0.7, 2.0, 1.0),
            ],
            v(&[0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0]),
        ),
        Draft::new(
            "rot4-dim16",
            16,
            vec![
                rot(0.5, 0.4, 1.0),
                rot(0.25, 1.2, 0.95),
                rot(0.6, 2.5, 1.0),
                rot(0.4, FRAC_PI_2, 0.8),
            ],
            v(&(0..16).map(|i| ((i * 7 % 5) as f64) - 2.0).collect::<Vec<_>>()),
        ),
        Draft::new(
            "resolvent-spd-dim8",
            8,
            vec![
                res(0.85, laplacian(8), Param::Auto),
                res(0.5, diag(&[0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875, 1.0]), Param::Auto),
            ],
            v(&[1.0, -1.0, 2.0, -2.0, 3.0, -3.0, 4.0, -4.0]),
        )
        .k(constant(1.0), "0 is a zero of both linear operators, hence a common fixed point"),
        Draft::new(
            "resolvent-skew-dim2",
            2,
            vec![
                res(2.0 / 3.0, vec![vec![1.0, 1.0], vec![-1.0, 1.0]], Param::Value(0.5)),
                rot(0.5, FRAC_PI_4, 1.0),
            ],
            v(&[1.0, -2.0]),
        )
        .k(constant(1.0), "0 is a zero of the operator and fixed by the rotation"),
        Draft::new(
            "resolvent-psd-rankdef-dim16",
            16,
            vec![
                res(0.7, diag(&[[2.0; 8], [0.0; 8]].concat()), Param::Auto),
                lin(0.5, shift(16, 0.9)),
                proj(0.5, ball(Vector::zeros(16), 1.0)),
            ],
            v(&(0..16).map(|i| (i as f64 - 7.5) / 2.0).collect::<Vec<_>>()),
        ),
        Draft::new(
            "averaged-linear-dim8",
            8,
            vec![
                lin(0.4, shift(8, 0.9)),
                lin(0.6, diag(&[1.0, -1.0, 1.0, -1.0, 1.0, -1.0, 1.0, -1.0])),
            ],
            filled(8, 2.0),
        ),
        Draft::new(
            "mixed-kinds-dim2",
            2,
            vec![
                proj(0.5, ball(v(&[0.5, 0.0]), 1.0)),
                rot(0.5, FRAC_PI_2, 1.0),
                res(2.0 / 3.0, diag(&[1.0, 2.0]), Param::Value(0.5)),
            ],
            v(&[3.0, -1.0]),
        )
        .k(
            BoundFn::inverse_power(1.0, 0.1, 1.0).expect("valid"),
            "0 is a common fixed point; K(ε) = 1 + 0.1/ε never drops below 1",
        ),
        Draft::new(
            "mixed-kinds-dim16",
            16,
            vec![
                proj(0.5, halfspace(filled(16, 1.0), 1.0)),
                lin(0.5, shift(16, 0.8)),
                res(0.8, laplacian(16), Param::Auto),
                rot(0.5, 1.0, 1.0),
            ],
            v(&(0..16).map(|i| if i < 8 { 1.0 } else { -0.5 }).collect::<Vec<_>>()),
        )
        .k(
            BoundFn::step_table(vec![(1e-9, 2.0), (1.0, 1.0)]).expect("valid"),
            "0 is a common fixed point; the table never drops below 1",
        ),
        Draft::new(
            "small-alpha",
            2,
            vec![rot(0.01, FRAC_PI_2, 1.0), rot(0.01, FRAC_PI_3, 1.0)],
            v(&[1.0, 1.0]),
        ),
        Draft::new(
            "proj2-affine-dim16",
            16,
            vec![
                proj(0.5, affine((0..8).map(|i| e(16, i, 1.0)).collect(), Vector::zeros(16))),
                proj(
                    0.9,
                    affine(
                        (0..4)
                            .map(|i| e(16, i, 1.0))
                            .chain((0..4).map(|j| e(16, 4 + j, 0.7f64.cos()).lincomb(1.0, &e(16, 8 + j, 0.7f64.sin()), 1.0)))
                            .collect(),
                        Vector::zeros(16),
                    ),
                ),
            ],
            filled(16, 1.0),
        ),
        Draft::new(
            "box-ball-inconsistent-dim8",
            8,
            vec![
                proj(0.5, boxed(filled(8, 1.0), filled(8, 2.0))),
                proj(0.5, ball(e(8, 0, -3.0), 1.0)),
            ],
            Vector::zeros(8),
        )
        .k(
            constant(3.0),
            "the box and the ball are fixed by their factors; their points nearest 0 have norms √8 and 2",
        )
        .fixed(None),
        Draft::new(
            "rot2-scaled",
            2,
            vec![rot(0.5, FRAC_PI_2, 0.5), rot(0.5, FRAC_PI_4, 1.0)],
            v(&[2.0, 0.0]),
        ),
        Draft::new(
            "rot2-half-turn-pair",
            2,
            vec![rot(0.75, PI - 0.25, 1.0), rot(0.25, 0.25, 1.0)],
            v(&[0.0, -3.0]),
        ),
    ]
}

/// The builtin corpus, in a fixed order.
pub fn builtin_corpus() -> Vec<Instance> {
    drafts()
        .into_iter()
        .map(|d| {
            let id = d.id;
            Instance::from_spec(d.spec()).unwrap_or_else(|e| panic!("builtin instance {id} is invalid: {e}"))
        })
        .collect()
}
