//! Truncated formal power series in the trace variable `v` with exact
//! rational coefficients, plus the Pochhammer products `(a)_r` and `(a)_∞`.
//!
//! A [`VSeries`] of order `N` is known modulo `v^{N+1}`. Binary operations
//! between series of different orders truncate to the smaller order.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{QtError, Result};
use crate::rational::{int, Rational};

/// Default truncation order for exact checks.
pub const DEFAULT_ORDER: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VSeries {
    coeffs: Vec<Rational>,
}

impl VSeries {
    pub fn zero(order: usize) -> Self {
        VSeries { coeffs: vec![Rational::zero(); order + 1] }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Rational::one(), order)
    }

    pub fn constant(c: Rational, order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = c;
        s
    }

    /// `c·v^power`, which is zero when `power > order`.
    pub fn monomial(c: Rational, power: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if power <= order {
            s.coeffs[power] = c;
        }
        s
    }

    /// The series `v`.
    pub fn v(order: usize) -> Self {
        Self::monomial(Rational::one(), 1, order)
    }

    /// Series with the given coefficients; the order is `coeffs.len() - 1`.
    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        VSeries { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficient of `v^d`; zero past the known order is *not* implied, so
    /// this panics on out-of-range access.
    pub fn coeff(&self, d: usize) -> &Rational {
        &self.coeffs[d]
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order());
        VSeries { coeffs: self.coeffs[..=order].to_vec() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        VSeries { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    /// Largest coefficient-wise absolute difference over the common order.
    pub fn max_abs_diff(&self, other: &VSeries) -> Rational {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// Multiplicative inverse modulo `v^{N+1}`.
    pub fn inverse(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(QtError::NonUnit(c0.to_string()));
        }
        let inv0 = c0.recip();
        let n = self.order();
        let mut out = vec![Rational::zero(); n + 1];
        out[0] = inv0.clone();
        for d in 1..=n {
            let mut acc = Rational::zero();
            for k in 1..=d {
                if !self.coeffs[k].is_zero() {
                    acc += &self.coeffs[k] * &out[d - k];
                }
            }
            out[d] = -acc * &inv0;
        }
        Ok(VSeries { coeffs: out })
    }

    /// `self / other`, requiring `other` to be a unit.
    pub fn div(&self, other: &VSeries) -> Result<Self> {
        Ok(self * &other.inverse()?)
    }

    /// Formal exponential; the constant term must vanish.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(QtError::Precondition(
                "exp needs a series with zero constant term".into(),
            ));
        }
        let n = self.order();
        let mut out = vec![Rational::zero(); n + 1];
        out[0] = Rational::one();
        // d·f_d = Σ_{k=1}^{d} k a_k f_{d-k}
        for d in 1..=n {
            let mut acc = Rational::zero();
            for k in 1..=d {
                if !self.coeffs[k].is_zero() {
                    acc += &self.coeffs[k] * &out[d - k] * int(k as i64);
                }
            }
            out[d] = acc / int(d as i64);
        }
        Ok(VSeries { coeffs: out })
    }

    /// Formal logarithm; the constant term must be 1.
    pub fn log(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(QtError::Precondition(
                "log needs a series with constant term 1".into(),
            ));
        }
        let n = self.order();
        let mut out = vec![Rational::zero(); n + 1];
        // d·a_d = d·f_d − Σ_{k=1}^{d-1} k a_k f_{d-k}
        for d in 1..=n {
            let mut acc = &self.coeffs[d] * int(d as i64);
            for k in 1..d {
                if !out[k].is_zero() {
                    acc -= &out[k] * &self.coeffs[d - k] * int(k as i64);
                }
            }
            out[d] = acc / int(d as i64);
        }
        Ok(VSeries { coeffs: out })
    }

    /// `self^κ = exp(κ·log self)` for a unit-normalized base.
    pub fn pow_rational(&self, kappa: &Rational) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(QtError::Precondition(format!(
                "rational powers need constant term 1, got {}",
                self.coeffs[0]
            )));
        }
        if kappa.is_zero() {
            return Ok(Self::one(self.order()));
        }
        self.log()?.scale(kappa).exp()
    }

    /// Integer power by repeated squaring; negative powers invert first.
    pub fn pow_int(&self, exp: i64) -> Result<Self> {
        let mut base = if exp < 0 { self.inverse()? } else { self.clone() };
        let mut e = exp.unsigned_abs();
        let mut acc = Self::one(self.order());
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Ok(acc)
    }

    /// Exact value of the truncated polynomial at a rational point.
    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }
}

impl fmt::Display for VSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (d, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match d {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})·v")?,
                _ => write!(f, "({c})·v^{d}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(v^{})", self.order() + 1)
    }
}

impl Serialize for VSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("VSeries", 2)?;
        st.serialize_field("order", &self.order())?;
        let coeffs: Vec<String> = self.coeffs.iter().map(ToString::to_string).collect();
        st.serialize_field("coefficients", &coeffs)?;
        st.end()
    }
}

impl<'a> Add<&'a VSeries> for &'a VSeries {
    type Output = VSeries;
    fn add(self, rhs: &VSeries) -> VSeries {
        let n = self.order().min(rhs.order());
        VSeries {
            coeffs: (0..=n).map(|d| &self.coeffs[d] + &rhs.coeffs[d]).collect(),
        }
    }
}

impl<'a> Sub<&'a VSeries> for &'a VSeries {
    type Output = VSeries;
    fn sub(self, rhs: &VSeries) -> VSeries {
        let n = self.order().min(rhs.order());
        VSeries {
            coeffs: (0..=n).map(|d| &self.coeffs[d] - &rhs.coeffs[d]).collect(),
        }
    }
}

impl<'a> Mul<&'a VSeries> for &'a VSeries {
    type Output = VSeries;
    fn mul(self, rhs: &VSeries) -> VSeries {
        let n = self.order().min(rhs.order());
        let mut out = vec![Rational::zero(); n + 1];
        for (i, a) in self.coeffs.iter().take(n + 1).enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().take(n + 1 - i).enumerate() {
                if !b.is_zero() {
                    out[i + j] += a * b;
                }
            }
        }
        VSeries { coeffs: out }
    }
}

impl Neg for &VSeries {
    type Output = VSeries;
    fn neg(self) -> VSeries {
        VSeries { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<VSeries> for VSeries {
            type Output = VSeries;
            fn $m(self, rhs: VSeries) -> VSeries {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a VSeries> for VSeries {
            type Output = VSeries;
            fn $m(self, rhs: &VSeries) -> VSeries {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for VSeries {
    type Output = VSeries;
    fn neg(self) -> VSeries {
        -&self
    }
}

/// Multiplies `s` in place by `(1 - a·v^p)`.
fn mul_binomial(s: &mut VSeries, a: &Rational, p: usize) {
    if a.is_zero() {
        return;
    }
    let n = s.order();
    if p > n {
        return;
    }
    for d in (p..=n).rev() {
        if !s.coeffs[d - p].is_zero() {
            let sub = &s.coeffs[d - p] * a;
            s.coeffs[d] -= sub;
        }
    }
}

/// `Π_{i=0}^{r-1} (1 - a·v^{shift+i})` modulo `v^{order+1}`.
pub fn pochhammer_fin_shifted(a: &Rational, shift: usize, r: usize, order: usize) -> VSeries {
    let mut s = VSeries::one(order);
    for i in 0..r {
        if shift + i > order {
            break;
        }
        mul_binomial(&mut s, a, shift + i);
    }
    s
}

/// `(a·v^shift)_∞`; factors with exponent past `order` are ≡ 1 and skipped.
pub fn pochhammer_inf_shifted(a: &Rational, shift: usize, order: usize) -> VSeries {
    let count = (order + 1).saturating_sub(shift);
    pochhammer_fin_shifted(a, shift, count, order)
}

/// `(a)_r = Π_{i=0}^{r-1} (1 - a v^i)`, with `(a)_0 = 1`.
pub fn pochhammer_fin(a: &Rational, r: usize, order: usize) -> VSeries {
    pochhammer_fin_shifted(a, 0, r, order)
}

/// `(a)_∞ = Π_{i≥0} (1 - a v^i)`, exact modulo `v^{order+1}`.
pub fn pochhammer_inf(a: &Rational, order: usize) -> VSeries {
    pochhammer_inf_shifted(a, 0, order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::enumerate_partitions;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn series(c: &[i64]) -> VSeries {
        VSeries::from_coeffs(c.iter().map(|&x| int(x)).collect())
    }

    fn arb_series(order: usize) -> impl Strategy<Value = VSeries> {
        prop::collection::vec((-9i64..=9, 1i64..=5), order + 1).prop_map(|v| {
            VSeries::from_coeffs(v.into_iter().map(|(n, d)| rat(n, d)).collect())
        })
    }

    fn arb_unit(order: usize) -> impl Strategy<Value = VSeries> {
        arb_series(order).prop_map(|mut s| {
            s.coeffs[0] = Rational::one();
            s
        })
    }

    /// Convolution written out term by term, independent of `Mul`.
    fn convolve(a: &VSeries, b: &VSeries) -> VSeries {
        let n = a.order().min(b.order());
        let coeffs = (0..=n)
            .map(|d| (0..=d).fold(Rational::zero(), |acc, k| acc + a.coeff(k) * b.coeff(d - k)))
            .collect();
        VSeries::from_coeffs(coeffs)
    }

    #[test]
    fn basic_arithmetic() {
        assert_eq!(series(&[1, 1, 0]) * series(&[1, -1, 0]), series(&[1, 0, -1]));
        let s = series(&[3, -2, 5, 7]);
        assert!((&s + &(-&s)).is_zero());
        // mixed orders truncate to the smaller one
        assert_eq!((&series(&[1, 1]) + &series(&[1, 1, 1])).order(), 1);
    }

    #[test]
    fn inverse_examples() {
        let geo = series(&[1, -1, 0, 0, 0, 0]).inverse().unwrap();
        assert_eq!(geo, series(&[1, 1, 1, 1, 1, 1]));
        assert_eq!(VSeries::one(4).inverse().unwrap(), VSeries::one(4));
        assert!(matches!(series(&[0, 1]).inverse(), Err(QtError::NonUnit(_))));
    }

    #[test]
    fn inverse_euler_product_counts_partitions() {
        let n = 20;
        let inv = pochhammer_inf_shifted(&int(1), 1, n).inverse().unwrap();
        for d in 0..=n {
            assert_eq!(*inv.coeff(d), int(enumerate_partitions(d).len() as i64));
        }
    }

    #[test]
    fn exp_log_examples() {
        assert_eq!(VSeries::zero(5).exp().unwrap(), VSeries::one(5));
        assert_eq!(VSeries::one(5).log().unwrap(), VSeries::zero(5));
        let s = series(&[1, -1, 0, 0, 0, 0, 0]);
        assert_eq!(s.log().unwrap().exp().unwrap(), s);
        assert!(series(&[1, 1]).exp().is_err());
        assert!(series(&[2, 1]).log().is_err());
        // exp(v) = Σ v^k/k!
        let e = VSeries::v(4).exp().unwrap();
        assert_eq!(*e.coeff(4), rat(1, 24));
    }

    #[test]
    fn pow_examples() {
        let s = series(&[1, 2, -3, 1, 4]);
        assert_eq!(s.pow_rational(&int(0)).unwrap(), VSeries::one(4));
        assert_eq!(s.pow_rational(&int(2)).unwrap(), &s * &s);
        let half = s.pow_rational(&rat(1, 2)).unwrap();
        assert_eq!(half.pow_rational(&int(2)).unwrap(), s);
        assert_eq!(s.pow_int(-1).unwrap(), s.inverse().unwrap());
        assert!(series(&[2, 1]).pow_rational(&rat(1, 2)).is_err());
    }

    #[test]
    fn pochhammer_examples() {
        let a = rat(3, 7);
        assert_eq!(pochhammer_fin(&a, 0, 5), VSeries::one(5));
        assert_eq!(pochhammer_fin(&a, 1, 5), VSeries::constant(rat(4, 7), 5));
        assert_eq!(
            pochhammer_fin(&rat(1, 2), 2, 1),
            VSeries::from_coeffs(vec![rat(1, 2), rat(-1, 4)])
        );
        assert_eq!(pochhammer_inf(&int(0), 6), VSeries::one(6));
        assert_eq!(*pochhammer_inf(&a, 6).coeff(0), rat(4, 7));
    }

    #[test]
    fn pochhammer_reindexing() {
        // (a)_∞ = (1-a)·(a v)_∞
        let a = rat(-2, 5);
        let lhs = pochhammer_inf(&a, 10);
        let rhs = pochhammer_inf_shifted(&a, 1, 10).scale(&(Rational::one() - &a));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn pochhammer_inverse_is_unit() {
        for a in [rat(1, 3), rat(-5, 2), rat(7, 1)] {
            let p = pochhammer_inf(&a, 9);
            assert_eq!(&p * &p.inverse().unwrap(), VSeries::one(9));
        }
    }

    #[test]
    fn full_polynomial_evaluates_to_product() {
        // (a)_4 has degree 6 in v, so order 6 holds it exactly
        let (a, x) = (rat(1, 3), rat(1, 10));
        let poly = pochhammer_fin(&a, 4, 6);
        let direct = (0..4).fold(Rational::one(), |acc, i| {
            acc * (Rational::one() - &a * num::pow(x.clone(), i))
        });
        assert_eq!(poly.eval(&x), direct);
    }

    #[test]
    fn json_shape() {
        let s = VSeries::from_coeffs(vec![rat(1, 2), int(-3)]);
        let j = serde_json::to_value(&s).unwrap();
        assert_eq!(j["order"], 1);
        assert_eq!(j["coefficients"][0], "1/2");
        assert_eq!(j["coefficients"][1], "-3");
    }

    proptest! {
        #[test]
        fn ring_laws(a in arb_series(6), b in arb_series(6), c in arb_series(6)) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, convolve(&a, &b));
        }

        #[test]
        fn unit_inverse(a in arb_unit(7)) {
            prop_assert_eq!(&a * &a.inverse().unwrap(), VSeries::one(7));
        }

        #[test]
        fn log_exp_round_trip(a in arb_unit(6)) {
            prop_assert_eq!(a.log().unwrap().exp().unwrap(), a);
        }

        #[test]
        fn fractional_powers_compose(a in arb_unit(5), m in -3i64..=3, n in 1i64..=3) {
            let frac = a.pow_rational(&rat(m, n)).unwrap();
            prop_assert_eq!(frac.pow_int(n).unwrap(), a.pow_rational(&int(m)).unwrap());
        }

        #[test]
        fn truncation_stability(a in arb_unit(9), b in arb_series(9), k in 0usize..9) {
            let lo = |s: &VSeries| s.truncate(k);
            prop_assert_eq!(lo(&(&a * &b)), &lo(&a) * &lo(&b));
            prop_assert_eq!(lo(&a.inverse().unwrap()), lo(&a).inverse().unwrap());
            prop_assert_eq!(lo(&a.log().unwrap()), lo(&a).log().unwrap());
            prop_assert_eq!(
                lo(&a.pow_rational(&rat(2, 3)).unwrap()),
                lo(&a).pow_rational(&rat(2, 3)).unwrap()
            );
            prop_assert_eq!(pochhammer_inf(&rat(2, 7), 9).truncate(k), pochhammer_inf(&rat(2, 7), k));
        }
    }
}
