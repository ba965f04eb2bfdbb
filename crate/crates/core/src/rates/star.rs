use rug::{Float, Rational};

use crate::error::{Error, Result};

pub(crate) fn rational_from_f64(x: f64, what: &str) -> Result<Rational> {
    Rational::from_f64(x).ok_or_else(|| Error::invalid(format!("{what} must be finite, got {x}")))
}

pub(crate) fn unit_interval_rational(x: f64, what: &str) -> Result<Rational> {
    if x > 0.0 && x < 1.0 {
        rational_from_f64(x, what)
    } else {
        Err(Error::invalid(format!("{what} = {x} must lie strictly inside (0, 1)")))
    }
}

fn check_open_unit(a: &Rational) -> Result<()> {
    if *a > 0 && *a < 1 {
        Ok(())
    } else {
        Err(Error::invalid(format!("parameter {a} must lie strictly inside (0, 1)")))
    }
}

/// `a / (1 − a)`
fn odds(a: &Rational) -> Rational {
    a / Rational::from(1 - a)
}

fn from_odds_sum(s: Rational) -> Rational {
    // 1 / (1 + 1/s)  =  s / (s + 1)
    let denom = Rational::from(&s + 1u32);
    s / denom
}

/// The parameter of `R₂ ∘ R₁` for an `a`-averaged `R₁` and `b`-averaged `R₂`.
pub fn star(a: &Rational, b: &Rational) -> Result<Rational> {
    check_open_unit(a)?;
    check_open_unit(b)?;
    Ok(from_odds_sum(odds(a) + odds(b)))
}

/// Closed form `1 / (1 + 1/Σ αᵢ/(1 − αᵢ))` for two or more parameters.
pub fn star_many(alphas: &[Rational]) -> Result<Rational> {
    if alphas.len() < 2 {
        return Err(Error::invalid("star_many needs at least two parameters"));
    }
    let mut sum = Rational::new();
    for a in alphas {
        check_open_unit(a)?;
        sum += odds(a);
    }
    Ok(from_odds_sum(sum))
}

/// [`star`] on machine floats: exact rational evaluation, rounded to nearest.
pub fn star_f64(a: f64, b: f64) -> Result<f64> {
    let r = star(
        &unit_interval_rational(a, "alpha")?,
        &unit_interval_rational(b, "alpha")?,
    )?;
    Ok(rational_to_f64(&r))
}

/// [`star_many`] on machine floats.
pub fn star_many_f64(alphas: &[f64]) -> Result<f64> {
    let rs = alphas
        .iter()
        .map(|a| unit_interval_rational(*a, "alpha"))
        .collect::<Result<Vec<_>>>()?;
    Ok(rational_to_f64(&star_many(&rs)?))
}

pub(crate) fn rational_to_f64(r: &Rational) -> f64 {
    Float::with_val(53, r).to_f64()
}
