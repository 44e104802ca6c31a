//! Truncated series in `v` and the vertex ratio `ζ = z_2/z_1`.
//!
//! A two-vertex trace has terms `v^d ζ^e` with `e ≥ -d` (an intermediate
//! state of degree `d + e ≥ 0`), so plain truncation in `ζ` is not a ring.
//! Coefficients are instead stored in the coordinates `X = v/ζ`, `Y = ζ`,
//! where `v^d ζ^e = X^d Y^{d+e}`; the box `X^{≤N} Y^{≤M}` is a genuine
//! quotient ring and `Y`-degree equals the intermediate degree.

use num::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{QtError, Result};
use crate::qseries::VSeries;
use crate::rational::{int, Rational};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZetaSeries {
    x_order: usize,
    y_order: usize,
    coeffs: Vec<Rational>,
}

impl ZetaSeries {
    /// The zero series modulo `(X^{x_order+1}, Y^{y_order+1})`.
    pub fn zero(x_order: usize, y_order: usize) -> Self {
        ZetaSeries { x_order, y_order, coeffs: vec![Rational::zero(); (x_order + 1) * (y_order + 1)] }
    }

    pub fn one(x_order: usize, y_order: usize) -> Self {
        let mut s = Self::zero(x_order, y_order);
        s.coeffs[0] = Rational::one();
        s
    }

    /// Embeds a series in `v` alone (`v = XY`).
    pub fn from_v_series(series: &VSeries, y_order: usize) -> Self {
        let n = series.order();
        let mut s = Self::zero(n, y_order);
        for d in 0..=n.min(y_order) {
            let i = s.idx(d, d);
            s.coeffs[i] = series.coeff(d).clone();
        }
        s
    }

    pub fn x_order(&self) -> usize {
        self.x_order
    }

    pub fn y_order(&self) -> usize {
        self.y_order
    }

    fn idx(&self, a: usize, b: usize) -> usize {
        a * (self.y_order + 1) + b
    }

    /// Coefficient of `X^a Y^b` (zero outside the box).
    pub fn xy_coeff(&self, a: usize, b: usize) -> Rational {
        if a <= self.x_order && b <= self.y_order {
            self.coeffs[self.idx(a, b)].clone()
        } else {
            Rational::zero()
        }
    }

    /// Adds `c·X^a Y^b`; terms outside the box vanish.
    pub fn add_xy(&mut self, a: usize, b: usize, c: &Rational) {
        if a <= self.x_order && b <= self.y_order {
            let i = self.idx(a, b);
            self.coeffs[i] += c;
        }
    }

    /// Whether `v^d ζ^e` is retained by the truncation.
    pub fn retains(&self, d: usize, e: i64) -> bool {
        let b = d as i64 + e;
        d <= self.x_order && b >= 0 && b as usize <= self.y_order
    }

    /// Coefficient of `v^d ζ^e`.
    pub fn coeff(&self, d: usize, e: i64) -> Rational {
        if self.retains(d, e) {
            self.xy_coeff(d, (d as i64 + e) as usize)
        } else {
            Rational::zero()
        }
    }

    /// Adds `c·v^d ζ^e`.
    pub fn add_term(&mut self, d: usize, e: i64, c: &Rational) {
        if self.retains(d, e) {
            self.add_xy(d, (d as i64 + e) as usize, c);
        }
    }

    /// The `ζ^e` layer as a series in `v`; coefficients cut by the box are 0.
    pub fn zeta_layer(&self, e: i64) -> VSeries {
        VSeries::from_coeffs((0..=self.x_order).map(|d| self.coeff(d, e)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn check_shape(&self, other: &ZetaSeries) -> Result<()> {
        if (self.x_order, self.y_order) != (other.x_order, other.y_order) {
            return Err(QtError::SizeMismatch {
                left: (self.x_order + 1) * (self.y_order + 1),
                right: (other.x_order + 1) * (other.y_order + 1),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &ZetaSeries) -> Result<Self> {
        self.check_shape(other)?;
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(ZetaSeries { x_order: self.x_order, y_order: self.y_order, coeffs })
    }

    pub fn sub(&self, other: &ZetaSeries) -> Result<Self> {
        self.add(&other.scale(&int(-1)))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        ZetaSeries {
            x_order: self.x_order,
            y_order: self.y_order,
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn mul(&self, other: &ZetaSeries) -> Result<Self> {
        self.check_shape(other)?;
        let (n, m) = (self.x_order, self.y_order);
        let mut out = Self::zero(n, m);
        for i in 0..=n {
            for j in 0..=m {
                let f = &self.coeffs[self.idx(i, j)];
                if f.is_zero() {
                    continue;
                }
                for a in 0..=n - i {
                    for b in 0..=m - j {
                        let g = &other.coeffs[other.idx(a, b)];
                        if !g.is_zero() {
                            let k = out.idx(i + a, j + b);
                            out.coeffs[k] += f * g;
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Index pairs ordered by total degree `a + b`, skipping the origin.
    fn by_total_degree(&self) -> Vec<(usize, usize)> {
        let mut cells: Vec<(usize, usize)> = (0..=self.x_order)
            .flat_map(|a| (0..=self.y_order).map(move |b| (a, b)))
            .filter(|&(a, b)| a + b > 0)
            .collect();
        cells.sort_by_key(|&(a, b)| (a + b, a));
        cells
    }

    /// `Σ_{0 < (i,j) ≤ (a,b)} w(i,j) f_{ij} g_{a-i,b-j}`.
    fn weighted_conv(&self, g: &[Rational], a: usize, b: usize, weighted: bool, skip_top: bool) -> Rational {
        let mut acc = Rational::zero();
        for i in 0..=a {
            for j in 0..=b {
                if (i == 0 && j == 0) || (skip_top && i == a && j == b) {
                    continue;
                }
                let f = &self.coeffs[self.idx(i, j)];
                let h = &g[self.idx(a - i, b - j)];
                if f.is_zero() || h.is_zero() {
                    continue;
                }
                if weighted {
                    acc += f * h * int((i + j) as i64);
                } else {
                    acc += f * h;
                }
            }
        }
        acc
    }

    /// Formal exponential (constant term must vanish), from the Euler
    /// derivation identity `D e^f = e^f D f` with `D = X∂_X + Y∂_Y`.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs[0].is_zero() {
            return Err(QtError::Precondition("exp needs a zero constant term".into()));
        }
        let mut out = Self::one(self.x_order, self.y_order);
        for (a, b) in self.by_total_degree() {
            let acc = self.weighted_conv(&out.coeffs, a, b, true, false);
            let k = out.idx(a, b);
            out.coeffs[k] = acc / int((a + b) as i64);
        }
        Ok(out)
    }

    /// Formal logarithm (constant term must be 1).
    pub fn log(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(QtError::Precondition("log needs constant term 1".into()));
        }
        // D g = g · D f  ⇒  s f_{ab} = s g_{ab} − Σ_{(i,j) ≠ (a,b)} (i+j) f_{ij} g_{a-i,b-j}
        let mut out = Self::zero(self.x_order, self.y_order);
        for (a, b) in self.by_total_degree() {
            let s = int((a + b) as i64);
            let acc = out.weighted_conv(&self.coeffs, a, b, true, true);
            let k = out.idx(a, b);
            out.coeffs[k] = (&self.coeffs[k] * &s - acc) / s;
        }
        Ok(out)
    }

    pub fn inverse(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(QtError::NonUnit(c0.to_string()));
        }
        let inv0 = c0.recip();
        let mut out = Self::zero(self.x_order, self.y_order);
        out.coeffs[0] = inv0.clone();
        for (a, b) in self.by_total_degree() {
            let acc = self.weighted_conv(&out.coeffs, a, b, false, false);
            let k = out.idx(a, b);
            out.coeffs[k] = -acc * &inv0;
        }
        Ok(out)
    }

    pub fn div(&self, other: &ZetaSeries) -> Result<Self> {
        self.mul(&other.inverse()?)
    }

    /// `self^κ` for a series with constant term 1.
    pub fn pow_rational(&self, kappa: &Rational) -> Result<Self> {
        if kappa.is_zero() {
            return Ok(Self::one(self.x_order, self.y_order));
        }
        self.log()?.scale(kappa).exp()
    }

    pub fn max_abs_diff(&self, other: &ZetaSeries) -> Result<Rational> {
        self.check_shape(other)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| num::abs(a - b))
            .max()
            .unwrap_or_else(Rational::zero))
    }

    /// Nonzero terms as `(d, e, c)` for `c·v^d ζ^e`.
    pub fn terms(&self) -> Vec<(usize, i64, Rational)> {
        let mut out = Vec::new();
        for a in 0..=self.x_order {
            for b in 0..=self.y_order {
                let c = &self.coeffs[self.idx(a, b)];
                if !c.is_zero() {
                    out.push((a, b as i64 - a as i64, c.clone()));
                }
            }
        }
        out
    }
}

impl Serialize for ZetaSeries {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("ZetaSeries", 3)?;
        st.serialize_field("v_order", &self.x_order)?;
        st.serialize_field("intermediate_degree_cap", &self.y_order)?;
        let terms: Vec<(usize, i64, String)> =
            self.terms().into_iter().map(|(d, e, c)| (d, e, c.to_string())).collect();
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn series_from(n: usize, m: usize, vals: &[i64]) -> ZetaSeries {
        let mut s = ZetaSeries::zero(n, m);
        let mut it = vals.iter().cycle();
        for a in 0..=n {
            for b in 0..=m {
                let x = *it.next().unwrap();
                s.add_xy(a, b, &rat(x, 1 + (a + 2 * b) as i64));
            }
        }
        s
    }

    #[test]
    fn coordinates() {
        let mut s = ZetaSeries::zero(3, 5);
        s.add_term(2, -1, &int(7));
        assert_eq!(s.xy_coeff(2, 1), int(7));
        assert_eq!(s.coeff(2, -1), int(7));
        assert!(!s.retains(1, -2));
        assert!(!s.retains(2, 4));
        s.add_term(1, -2, &int(1)); // dropped
        assert_eq!(s.terms().len(), 1);
    }

    #[test]
    fn v_embedding_is_a_ring_map() {
        let a = VSeries::from_coeffs(vec![int(1), rat(1, 2), int(3), rat(-2, 3)]);
        let b = VSeries::from_coeffs(vec![int(2), int(-1), rat(1, 5), int(1)]);
        let za = ZetaSeries::from_v_series(&a, 5);
        let zb = ZetaSeries::from_v_series(&b, 5);
        assert_eq!(za.mul(&zb).unwrap(), ZetaSeries::from_v_series(&(&a * &b), 5));
        assert_eq!(za.zeta_layer(0), a);
    }

    #[test]
    fn exp_of_single_variable() {
        // exp(Y) has coefficients 1/b!
        let mut s = ZetaSeries::zero(2, 4);
        s.add_xy(0, 1, &int(1));
        let e = s.exp().unwrap();
        let mut fact = int(1);
        for b in 0..=4 {
            if b > 0 {
                fact *= int(b as i64);
            }
            assert_eq!(e.xy_coeff(0, b), fact.recip());
            assert!(e.xy_coeff(1, b).is_zero());
        }
    }

    proptest! {
        #[test]
        fn exp_log_roundtrip(vals in proptest::collection::vec(-5i64..5, 12)) {
            let mut f = series_from(3, 4, &vals);
            f.coeffs[0] = Rational::zero();
            let g = f.exp().unwrap();
            prop_assert_eq!(g.log().unwrap(), f.clone());
            // exp is a homomorphism from + to ×
            let h = series_from(3, 4, &vals[3..]);
            let mut h = h; h.coeffs[0] = Rational::zero();
            prop_assert_eq!(f.add(&h).unwrap().exp().unwrap(), g.mul(&h.exp().unwrap()).unwrap());
        }

        #[test]
        fn inverse_roundtrip(vals in proptest::collection::vec(1i64..5, 12)) {
            let f = series_from(3, 3, &vals);
            let inv = f.inverse().unwrap();
            prop_assert_eq!(f.mul(&inv).unwrap(), ZetaSeries::one(3, 3));
        }

        #[test]
        fn rational_powers_compose(vals in proptest::collection::vec(-4i64..4, 12)) {
            let mut f = series_from(2, 4, &vals);
            f.coeffs[0] = Rational::one();
            let half = f.pow_rational(&rat(1, 2)).unwrap();
            prop_assert_eq!(half.mul(&half).unwrap(), f);
        }
    }
}
