//! Exact rational arithmetic on 128-bit integers with overflow detection.
//!
//! The inclusion-exclusion identities this crate checks are exact statements,
//! so they are evaluated in exact arithmetic. Overflow is an error, never a
//! silent fall back to floating point.

use std::fmt;

use crate::error::{Error, Result};

/// A reduced fraction `num / den` with `den > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rational {
    num: i128,
    den: i128,
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    a = a.abs();
    b = b.abs();
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    /// Builds `num / den`, reduced and sign-normalized. `den == 0` is a
    /// domain error.
    pub fn new(num: i128, den: i128) -> Result<Self> {
        if den == 0 {
            return Err(Error::domain("rational with zero denominator"));
        }
        let g = gcd(num, den);
        let (mut num, mut den) = if g == 0 { (0, 1) } else { (num / g, den / g) };
        if den < 0 {
            num = num
                .checked_neg()
                .ok_or_else(|| Error::overflow("rational sign normalization"))?;
            den = den
                .checked_neg()
                .ok_or_else(|| Error::overflow("rational sign normalization"))?;
        }
        Ok(Rational { num, den })
    }

    pub fn from_integer(n: i128) -> Self {
        Rational { num: n, den: 1 }
    }

    pub fn numerator(&self) -> i128 {
        self.num
    }

    pub fn denominator(&self) -> i128 {
        self.den
    }

    pub fn checked_mul(&self, rhs: &Rational) -> Result<Rational> {
        // Cross-reduce first so intermediate products stay as small as possible.
        let g1 = gcd(self.num, rhs.den).max(1);
        let g2 = gcd(rhs.num, self.den).max(1);
        let num = (self.num / g1)
            .checked_mul(rhs.num / g2)
            .ok_or_else(|| Error::overflow("rational multiply"))?;
        let den = (self.den / g2)
            .checked_mul(rhs.den / g1)
            .ok_or_else(|| Error::overflow("rational multiply"))?;
        Rational::new(num, den)
    }

    pub fn checked_add(&self, rhs: &Rational) -> Result<Rational> {
        let g = gcd(self.den, rhs.den).max(1);
        let lhs_scale = rhs.den / g;
        let rhs_scale = self.den / g;
        let a = self
            .num
            .checked_mul(lhs_scale)
            .ok_or_else(|| Error::overflow("rational add"))?;
        let b = rhs
            .num
            .checked_mul(rhs_scale)
            .ok_or_else(|| Error::overflow("rational add"))?;
        let num = a
            .checked_add(b)
            .ok_or_else(|| Error::overflow("rational add"))?;
        let den = self
            .den
            .checked_mul(lhs_scale)
            .ok_or_else(|| Error::overflow("rational add"))?;
        Rational::new(num, den)
    }

    pub fn checked_sub(&self, rhs: &Rational) -> Result<Rational> {
        let neg = Rational::new(
            rhs.num
                .checked_neg()
                .ok_or_else(|| Error::overflow("rational negate"))?,
            rhs.den,
        )?;
        self.checked_add(&neg)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}
