//! Closed intervals `[lo, hi]` with MPFR endpoints and outward rounding.
//!
//! Every operation rounds the lower endpoint down and the upper endpoint up,
//! so the true real result of an expression evaluated on enclosed inputs is
//! always enclosed by the output.

use std::cmp::Ordering;
use std::fmt;

use rug::float::Round;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Enclosure {
    lo: Float,
    hi: Float,
}

impl Enclosure {
    /// Exact enclosure of a machine float (requires `prec ≥ 53`).
    pub fn point(prec: u32, v: f64) -> Self {
        let f = Float::with_val(prec, v);
        Enclosure { lo: f.clone(), hi: f }
    }

    pub fn from_float(v: Float) -> Self {
        Enclosure { lo: v.clone(), hi: v }
    }

    pub fn from_rational(prec: u32, r: &Rational) -> Self {
        let lo = Float::with_val_round(prec, r, Round::Down).0;
        let hi = Float::with_val_round(prec, r, Round::Up).0;
        Enclosure { lo, hi }
    }

    pub fn lo(&self) -> &Float {
        &self.lo
    }

    pub fn hi(&self) -> &Float {
        &self.hi
    }

    pub fn prec(&self) -> u32 {
        self.lo.prec().max(self.hi.prec())
    }

    pub fn upper_f64(&self) -> f64 {
        self.hi.to_f64_round(Round::Up)
    }

    pub fn lower_f64(&self) -> f64 {
        self.lo.to_f64_round(Round::Down)
    }

    pub fn add(&self, o: &Enclosure) -> Enclosure {
        let p = self.prec().max(o.prec());
        Enclosure {
            lo: Float::with_val_round(p, &self.lo + &o.lo, Round::Down).0,
            hi: Float::with_val_round(p, &self.hi + &o.hi, Round::Up).0,
        }
    }

    pub fn sub(&self, o: &Enclosure) -> Enclosure {
        let p = self.prec().max(o.prec());
        Enclosure {
            lo: Float::with_val_round(p, &self.lo - &o.hi, Round::Down).0,
            hi: Float::with_val_round(p, &self.hi - &o.lo, Round::Up).0,
        }
    }

    pub fn mul(&self, o: &Enclosure) -> Enclosure {
        let p = self.prec().max(o.prec());
        let pairs = [
            (&self.lo, &o.lo),
            (&self.lo, &o.hi),
            (&self.hi, &o.lo),
            (&self.hi, &o.hi),
        ];
        let lo = pairs
            .iter()
            .map(|(a, b)| Float::with_val_round(p, *a * *b, Round::Down).0)
            .min_by(cmp_float)
            .expect("four candidates");
        let hi = pairs
            .iter()
            .map(|(a, b)| Float::with_val_round(p, *a * *b, Round::Up).0)
            .max_by(cmp_float)
            .expect("four candidates");
        Enclosure { lo, hi }
    }

    /// Fails when the divisor encloses zero.
    pub fn div(&self, o: &Enclosure) -> Result<Enclosure> {
        if !(o.lo > 0 || o.hi < 0) {
            return Err(Error::Internal(format!(
                "division by an enclosure containing zero: [{}, {}]",
                o.lo, o.hi
            )));
        }
        let p = self.prec().max(o.prec());
        let pairs = [
            (&self.lo, &o.lo),
            (&self.lo, &o.hi),
            (&self.hi, &o.lo),
            (&self.hi, &o.hi),
        ];
        let lo = pairs
            .iter()
            .map(|(a, b)| Float::with_val_round(p, *a / *b, Round::Down).0)
            .min_by(cmp_float)
            .expect("four candidates");
        let hi = pairs
            .iter()
            .map(|(a, b)| Float::with_val_round(p, *a / *b, Round::Up).0)
            .max_by(cmp_float)
            .expect("four candidates");
        Ok(Enclosure { lo, hi })
    }

    pub fn sqr(&self) -> Enclosure {
        if self.lo >= 0 {
            let p = self.prec();
            Enclosure {
                lo: Float::with_val_round(p, self.lo.square_ref(), Round::Down).0,
                hi: Float::with_val_round(p, self.hi.square_ref(), Round::Up).0,
            }
        } else {
            self.mul(self)
        }
    }

    /// Fails on a negative lower endpoint.
    pub fn sqrt(&self) -> Result<Enclosure> {
        if self.lo < 0 {
            return Err(Error::Internal(format!(
                "square root of an enclosure with negative part: [{}, {}]",
                self.lo, self.hi
            )));
        }
        let p = self.prec();
        Ok(Enclosure {
            lo: Float::with_val_round(p, self.lo.sqrt_ref(), Round::Down).0,
            hi: Float::with_val_round(p, self.hi.sqrt_ref(), Round::Up).0,
        })
    }

    /// `self^(−k)` for a positive enclosure and `k ≥ 0`.
    pub fn pow_neg(&self, k: f64) -> Result<Enclosure> {
        if !(self.lo > 0) || !(k >= 0.0) {
            return Err(Error::Internal("pow_neg needs a positive base and k ≥ 0".into()));
        }
        let p = self.prec();
        let e = Float::with_val(p.max(53), -k);
        // decreasing in the base
        Ok(Enclosure {
            lo: Float::with_val_round(p, (&self.hi).pow(&e), Round::Down).0,
            hi: Float::with_val_round(p, (&self.lo).pow(&e), Round::Up).0,
        })
    }

    pub fn max(&self, o: &Enclosure) -> Enclosure {
        Enclosure {
            lo: self.lo.clone().max(&o.lo),
            hi: self.hi.clone().max(&o.hi),
        }
    }

    /// `⌈hi⌉` as an exact integer.
    pub fn ceil_upper(&self) -> Result<Integer> {
        self.hi
            .clone()
            .ceil()
            .to_integer()
            .ok_or_else(|| Error::Internal(format!("cannot take the ceiling of {}", self.hi)))
    }
}

fn cmp_float(a: &Float, b: &Float) -> Ordering {
    a.partial_cmp(b).expect("enclosure endpoints are never NaN")
}

impl fmt::Display for Enclosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:.6e}, {:.6e}]", self.lo.to_f64(), self.hi.to_f64())
    }
}
