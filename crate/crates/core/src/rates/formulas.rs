use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use rug::{Float, Integer, Rational};
use serde::{Serialize, Serializer};

use super::bound_fn::UpperBound;
use super::enclosure::Enclosure;
use super::star::{rational_from_f64, star_many, unit_interval_rational};
use crate::error::{Error, Result};

pub const DEFAULT_PRECISION: u32 = 256;
pub const MIN_PRECISION: u32 = 64;

/// Certified enclosure of a real rate quantity; `upper()` is never below the
/// true value.
#[derive(Clone, Debug, PartialEq)]
pub struct RateValue {
    enclosure: Enclosure,
    precision_bits: u32,
}

impl RateValue {
    fn new(enclosure: Enclosure, precision_bits: u32) -> Self {
        RateValue {
            enclosure,
            precision_bits,
        }
    }

    pub fn upper(&self) -> &Float {
        self.enclosure.hi()
    }

    /// Lower end of the enclosure. For expressions that take a bound
    /// function this encloses the value at the function's upper bound.
    pub fn lower(&self) -> &Float {
        self.enclosure.lo()
    }

    /// The upper bound rounded up to a machine float.
    pub fn upper_f64(&self) -> f64 {
        self.enclosure.upper_f64()
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    pub fn enclosure(&self) -> &Enclosure {
        &self.enclosure
    }
}

impl fmt::Display for RateValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", sci_preview_float(self.upper(), 6))
    }
}

/// Exact natural-number rate index.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct RateIndex(Integer);

impl RateIndex {
    pub fn new(value: Integer) -> Result<Self> {
        if value < 0 {
            return Err(Error::Internal(format!("negative rate index {value}")));
        }
        Ok(RateIndex(value))
    }

    pub fn zero() -> Self {
        RateIndex(Integer::new())
    }

    pub fn value(&self) -> &Integer {
        &self.0
    }

    /// `n ≤ self`
    pub fn admits(&self, n: u64) -> bool {
        self.0 >= n
    }

    pub fn digits(&self) -> usize {
        self.0.to_string().len()
    }

    /// Three significant figures, e.g. `1.17e7`.
    pub fn sci_preview(&self) -> String {
        if self.0 < 1000 {
            return self.0.to_string();
        }
        sci_preview_float(&Float::with_val(128, &self.0), 3)
    }
}

impl fmt::Display for RateIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for RateIndex {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.0.to_string())
    }
}

fn sci_preview_float(v: &Float, sig: usize) -> String {
    let s = v.to_string_radix(10, Some(sig));
    // rug prints `1.17e7` style; normalise the exponent marker
    s.replace('@', "e")
}

type CustomModulus = dyn Fn(&Rational, &Rational) -> Result<Rational> + Send + Sync;

/// Modulus of strong nonexpansiveness `(b, ε) ↦ ω(b, ε)`.
#[derive(Clone)]
pub enum Modulus {
    /// `ω_α(b, ε) = α(1−α)ε²/(4b)` for an `α`-averaged map.
    Averaged(Rational),
    /// Must return a lower bound of `ω(b, ε)` for exact rational arguments.
    Custom(Arc<CustomModulus>),
}

impl fmt::Debug for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Modulus::Averaged(a) => f.debug_tuple("Averaged").field(a).finish(),
            Modulus::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl Modulus {
    pub fn averaged(alpha: f64) -> Result<Self> {
        Ok(Modulus::Averaged(unit_interval_rational(alpha, "alpha")?))
    }

    fn lower(&self, b: &Rational, eps: &Rational) -> Result<Rational> {
        match self {
            Modulus::Averaged(alpha) => {
                let spread = alpha * Rational::from(1 - alpha);
                Ok(spread * Rational::from(eps.square_ref()) / Rational::from(4u32 * b))
            }
            Modulus::Custom(f) => f(b, eps),
        }
    }
}

/// Evaluates the rate formulas at a fixed working precision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RateContext {
    precision_bits: u32,
}

impl Default for RateContext {
    fn default() -> Self {
        RateContext {
            precision_bits: DEFAULT_PRECISION,
        }
    }
}

fn positive(x: f64, what: &str) -> Result<f64> {
    if x.is_finite() && x > 0.0 {
        Ok(x)
    } else {
        Err(Error::invalid(format!("{what} must be a positive finite number, got {x}")))
    }
}

impl RateContext {
    pub fn new(precision_bits: u32) -> Result<Self> {
        if precision_bits < MIN_PRECISION {
            return Err(Error::invalid(format!(
                "precision must be at least {MIN_PRECISION} bits"
            )));
        }
        Ok(RateContext { precision_bits })
    }

    pub fn precision_bits(&self) -> u32 {
        self.precision_bits
    }

    fn point(&self, v: f64) -> Enclosure {
        Enclosure::point(self.precision_bits, v)
    }

    fn rational(&self, r: &Rational) -> Enclosure {
        Enclosure::from_rational(self.precision_bits, r)
    }

    fn value(&self, e: Enclosure) -> RateValue {
        RateValue::new(e, self.precision_bits)
    }

    /// `(L₁+L₂)(L₃+ρ)` with
    /// `ρ = (L₁+L₂+2βL₃ + √(L₁²+L₂²+2L₁L₂+8βL₁L₃+4βL₂L₃)) / (2β)`.
    pub fn theta(&self, beta: f64, l1: f64, l2: f64, l3: f64) -> Result<RateValue> {
        let [beta, l1, l2, l3] = [
            positive(beta, "beta")?,
            positive(l1, "L1")?,
            positive(l2, "L2")?,
            positive(l3, "L3")?,
        ]
        .map(|v| self.point(v));
        Ok(self.value(self.theta_enc(&beta, &l1, &l2, &l3)?))
    }

    pub(crate) fn theta_enc(
        &self,
        beta: &Enclosure,
        l1: &Enclosure,
        l2: &Enclosure,
        l3: &Enclosure,
    ) -> Result<Enclosure> {
        let two = self.point(2.0);
        let l1l3 = l1.mul(l3);
        let disc = l1
            .sqr()
            .add(&l2.sqr())
            .add(&two.mul(&l1.mul(l2)))
            .add(&self.point(8.0).mul(beta).mul(&l1l3))
            .add(&self.point(4.0).mul(beta).mul(&l2.mul(l3)));
        let sum = l1.add(l2);
        let rho = sum
            .add(&two.mul(beta).mul(l3))
            .add(&disc.sqrt()?)
            .div(&two.mul(beta))?;
        Ok(sum.mul(&l3.add(&rho)))
    }

    /// `(B, L)` with `L = K(δ/4) + δ/8` and
    /// `B = √(L² + 2Θ(α₂⁻¹ − 1, L, L, δ/8))`.
    fn b_enc(
        &self,
        alpha2: &Rational,
        k: &dyn UpperBound,
        delta: &Enclosure,
    ) -> Result<(Enclosure, Enclosure)> {
        let quarter = delta.div(&self.point(4.0))?;
        let eighth = delta.div(&self.point(8.0))?;
        let k_up = Enclosure::from_float(k.upper_over(&quarter)?);
        let l = k_up.add(&eighth);
        let beta = Rational::from(1 - alpha2) / alpha2;
        let theta = self.theta_enc(&self.rational(&beta), &l, &l, &eighth)?;
        let b = l.sqr().add(&self.point(2.0).mul(&theta)).sqrt()?;
        Ok((b, l))
    }

    fn phi_enc(
        &self,
        alpha1: &Rational,
        alpha2: &Rational,
        k: &dyn UpperBound,
        delta: &Enclosure,
    ) -> Result<Enclosure> {
        let (b, l) = self.b_enc(alpha2, k, delta)?;
        let branch = self
            .point(2.0)
            .sqrt()?
            .max(&self.point(4.0).mul(&b).div(delta)?);
        let one_minus = Rational::from(1 - alpha1);
        let inv = self.rational(&Rational::from(one_minus.recip_ref()));
        let odds = self.rational(&Rational::from(alpha1 / &one_minus));
        Ok(b
            .mul(&branch)
            .mul(&inv)
            .add(&odds.mul(&l))
            .add(&delta.div(&self.point(8.0))?))
    }

    fn psi_enc(&self, alphas: &[Rational], k: &dyn UpperBound, delta: &Enclosure) -> Result<Enclosure> {
        match alphas {
            [a1, a2] => self.phi_enc(a1, a2, k, delta),
            [init @ .., last] => {
                let inner = PsiBound {
                    ctx: self,
                    alphas: init,
                    k,
                    memo: RefCell::new(HashMap::new()),
                };
                self.phi_enc(&star_many(init)?, last, &inner, delta)
            }
            _ => Err(Error::invalid("psi needs at least two parameters")),
        }
    }

    pub fn b_bound(&self, alpha2: f64, k: &dyn UpperBound, delta: f64) -> Result<RateValue> {
        let alpha2 = unit_interval_rational(alpha2, "alpha2")?;
        let delta = self.point(positive(delta, "delta")?);
        Ok(self.value(self.b_enc(&alpha2, k, &delta)?.0))
    }

    pub fn phi(&self, alpha1: f64, alpha2: f64, k: &dyn UpperBound, delta: f64) -> Result<RateValue> {
        let alpha1 = unit_interval_rational(alpha1, "alpha1")?;
        let alpha2 = unit_interval_rational(alpha2, "alpha2")?;
        let delta = self.point(positive(delta, "delta")?);
        Ok(self.value(self.phi_enc(&alpha1, &alpha2, k, &delta)?))
    }

    /// `Ψ(m, {αᵢ}, K, δ)`, recursing through `Φ` with the composed parameter
    /// and the pointwise maximum of the inner `Ψ` and `K`.
    pub fn psi(&self, m: usize, alphas: &[f64], k: &dyn UpperBound, delta: f64) -> Result<RateValue> {
        let alphas = self.check_alphas(m, alphas)?;
        let delta = self.point(positive(delta, "delta")?);
        Ok(self.value(self.psi_enc(&alphas, k, &delta)?))
    }

    fn check_alphas(&self, m: usize, alphas: &[f64]) -> Result<Vec<Rational>> {
        if m < 2 {
            return Err(Error::invalid("m must be at least 2"));
        }
        if alphas.len() != m {
            return Err(Error::invalid(format!(
                "expected {m} averagedness parameters, got {}",
                alphas.len()
            )));
        }
        alphas
            .iter()
            .enumerate()
            .map(|(i, a)| unit_interval_rational(*a, &format!("alphas[{i}]")))
            .collect()
    }

    pub(crate) fn omega_enc(&self, alpha: &Rational, b: &Enclosure, eps: &Enclosure) -> Result<Enclosure> {
        let spread = alpha * Rational::from(1 - alpha);
        self.rational(&spread)
            .mul(&eps.sqr())
            .div(&self.point(4.0).mul(b))
    }

    /// `ω_α(b, ε) = α(1−α)ε²/(4b)`.
    pub fn omega(&self, alpha: f64, b: f64, eps: f64) -> Result<RateValue> {
        let alpha = unit_interval_rational(alpha, "alpha")?;
        let b = self.point(positive(b, "b")?);
        let eps = self.point(positive(eps, "eps")?);
        Ok(self.value(self.omega_enc(&alpha, &b, &eps)?))
    }

    /// `⌈(18b + 12A)/ε − 1⌉ · ⌈d / ω(d, ε²/(27b + 18A))⌉` with `A = afp(ε/6)`;
    /// a nonpositive first factor yields 0.
    ///
    /// Only `A` is rounded (upward, through its enclosure); the rest is
    /// evaluated in exact rational arithmetic so both ceilings are exact.
    pub fn varphi(
        &self,
        eps: f64,
        b: f64,
        d: f64,
        afp: &dyn UpperBound,
        modulus: &Modulus,
    ) -> Result<RateIndex> {
        let eps_q = rational_from_f64(positive(eps, "eps")?, "eps")?;
        let b = rational_from_f64(positive(b, "b")?, "b")?;
        let d = rational_from_f64(positive(d, "d")?, "d")?;
        let sixth = self.rational(&Rational::from(&eps_q / 6u32));
        let a = afp
            .upper_over(&sixth)?
            .to_rational()
            .ok_or_else(|| Error::Internal("bound function returned a non-finite value".into()))?;

        let first = (Rational::from(18u32 * &b) + Rational::from(12u32 * &a)) / &eps_q - 1u32;
        let first = Integer::from(first.ceil_ref());
        if first <= 0 {
            return Ok(RateIndex::zero());
        }
        let inner_eps = Rational::from(eps_q.square_ref())
            / (Rational::from(27u32 * &b) + Rational::from(18u32 * &a));
        let w = modulus.lower(&d, &inner_eps)?;
        if w <= 0 {
            return Err(Error::Internal(format!("modulus lower bound is not positive: {w}")));
        }
        let second = Integer::from((d / w).ceil_ref());
        RateIndex::new(first * second)
    }

    /// `Σ(ε) = φ(ε, b, d, δ ↦ Ψ(m, {αᵢ}, K, δ), ω_{α₁⋆…⋆αₘ})`.
    pub fn sigma(
        &self,
        m: usize,
        alphas: &[f64],
        k: &dyn UpperBound,
        b: f64,
        d: f64,
        eps: f64,
    ) -> Result<RateIndex> {
        let rats = self.check_alphas(m, alphas)?;
        let composed = star_many(&rats)?;
        let afp = PsiBound {
            ctx: self,
            alphas: &rats,
            k,
            memo: RefCell::new(HashMap::new()),
        };
        self.varphi(eps, b, d, &AfpOnly(&afp), &Modulus::Averaged(composed))
    }
}

/// `ρ ↦ max(Ψ(alphas, K, ρ), K(ρ))` with per-call memoisation.
struct PsiBound<'a> {
    ctx: &'a RateContext,
    alphas: &'a [Rational],
    k: &'a dyn UpperBound,
    memo: RefCell<HashMap<(String, String), Float>>,
}

impl PsiBound<'_> {
    fn psi_upper(&self, arg: &Enclosure) -> Result<Float> {
        let key = (arg.lo().to_string_radix(16, None), arg.hi().to_string_radix(16, None));
        if let Some(v) = self.memo.borrow().get(&key) {
            return Ok(v.clone());
        }
        let v = self.ctx.psi_enc(self.alphas, self.k, arg)?.hi().clone();
        self.memo.borrow_mut().insert(key, v.clone());
        Ok(v)
    }
}

impl UpperBound for PsiBound<'_> {
    fn upper_over(&self, arg: &Enclosure) -> Result<Float> {
        let psi = self.psi_upper(arg)?;
        let k = self.k.upper_over(arg)?;
        Ok(psi.max(&k))
    }
}

/// The `afp` argument of Σ is `δ ↦ Ψ(m, …, δ)` alone (no max with `K`).
struct AfpOnly<'a, 'b>(&'a PsiBound<'b>);

impl UpperBound for AfpOnly<'_, '_> {
    fn upper_over(&self, arg: &Enclosure) -> Result<Float> {
        self.0.psi_upper(arg)
    }
}
