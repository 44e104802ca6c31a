//! Exact rational scalars and a few helpers shared by every exact module.

use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{QtError, Result};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Parses `"p/q"` or `"p"`. Decimal notation is rejected so that exact and
/// floating-point inputs stay visibly distinct.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.contains('.') || s.contains('e') || s.contains('E') {
        return Err(QtError::Parse(format!(
            "'{s}' is not an exact rational (use num/den)"
        )));
    }
    let r = Rational::from_str(s).map_err(|e| QtError::Parse(format!("'{s}': {e}")))?;
    Ok(r)
}

/// Integer power with negative exponents allowed for nonzero bases.
pub fn pow_i(base: &Rational, exp: i64) -> Result<Rational> {
    if exp >= 0 {
        Ok(num::pow(base.clone(), exp as usize))
    } else if base.is_zero() {
        Err(QtError::DivisionByZero("0 raised to a negative power".into()))
    } else {
        Ok(num::pow(base.recip(), exp.unsigned_abs() as usize))
    }
}

pub fn pow_u(base: &Rational, exp: usize) -> Rational {
    num::pow(base.clone(), exp)
}

pub fn to_f64(r: &Rational) -> f64 {
    // `to_f64` on BigRational is exact up to rounding for any magnitude.
    num::ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

pub fn abs_diff(a: &Rational, b: &Rational) -> Rational {
    (a - b).abs()
}

/// `1 - x`, the ubiquitous factor of every Pochhammer product.
pub fn one_minus(x: &Rational) -> Rational {
    Rational::one() - x
}

pub fn checked_recip(x: &Rational, what: &str) -> Result<Rational> {
    if x.is_zero() {
        Err(QtError::DivisionByZero(what.to_string()))
    } else {
        Ok(x.recip())
    }
}

/// Serializes a rational as the string `"num/den"` (or `"n"`).
pub fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(r)
}
