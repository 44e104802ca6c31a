//! Bosonic Fock space on the power-sum basis.
//!
//! The Heisenberg algebra `[a_m, a_n] = κ m δ_{m,-n}` acts with `a_{-k}`
//! multiplying by `p_k` and `a_k = κ k ∂/∂p_k`. The deformed vertex operator
//! `V(z; s,t,u,w) = exp(Σ_k (u^k - w^k) a_{-k} z^k/k) exp(Σ_k (t^k - s^k) a_k z^{-k}/k)`
//! is handled through its two exponentials:
//! - the annihilation exponential is the shift `p_k ↦ p_k + κ(t^k - s^k) z^{-k}`;
//! - the creation exponential multiplies by `Σ_ν Π_i (u^{ν_i} - w^{ν_i}) z^{|ν|} p_ν / z_ν`.

mod multi;
mod vertex;
mod zeta;

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use num::{Signed, Zero};
use serde::Serialize;

use crate::error::{QtError, Result};
use crate::partitions::Partition;
use crate::rational::{int, pow_u, ser_rational, Rational};

pub use multi::{
    literal_product_discrepancy, two_vertex_expectation_brute, two_vertex_trace,
    vertex_product_expectation_closed,
    vertex_product_expectation_numeric, vertex_product_expectation_product_form,
    LiteralDiscrepancy,
};
pub use vertex::{
    apply_annihilation, apply_creation, creation_terms, normal_order_check, v0_trace,
    v0_trace_direct, v0_trace_projection, vertex_zero_mode_apply, zero_mode_expectation_closed,
    zero_mode_expectation_brute, zero_mode_matrix, ZeroModeMatrix,
};
pub use zeta::ZetaSeries;

/// A finite combination of power-sum monomials with rational coefficients.
/// Zero coefficients are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FockVector {
    terms: BTreeMap<Partition, Rational>,
}

impl FockVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn vacuum() -> Self {
        Self::basis(Partition::empty())
    }

    /// The basis vector `p_λ`.
    pub fn basis(lambda: Partition) -> Self {
        let mut v = Self::zero();
        v.add_term(lambda, Rational::from_integer(1.into()));
        v
    }

    pub fn from_terms<I: IntoIterator<Item = (Partition, Rational)>>(terms: I) -> Self {
        let mut v = Self::zero();
        for (p, c) in terms {
            v.add_term(p, c);
        }
        v
    }

    pub fn add_term(&mut self, lambda: Partition, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(lambda) {
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn coeff(&self, lambda: &Partition) -> Rational {
        self.terms.get(lambda).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Partition, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The homogeneous component of degree `d`.
    pub fn degree_part(&self, d: usize) -> FockVector {
        FockVector {
            terms: self
                .terms
                .iter()
                .filter(|(p, _)| p.size() == d)
                .map(|(p, c)| (p.clone(), c.clone()))
                .collect(),
        }
    }

    /// `Some(d)` when every term has degree `d` (the zero vector has none).
    pub fn homogeneous_degree(&self) -> Option<usize> {
        let mut degrees = self.terms.keys().map(Partition::size);
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    pub fn scale(&self, c: &Rational) -> FockVector {
        if c.is_zero() {
            return Self::zero();
        }
        FockVector { terms: self.terms.iter().map(|(p, x)| (p.clone(), x * c)).collect() }
    }

    pub fn add(&self, other: &FockVector) -> FockVector {
        let mut out = self.clone();
        for (p, c) in &other.terms {
            out.add_term(p.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &FockVector) -> FockVector {
        self.add(&other.scale(&int(-1)))
    }

    pub fn max_abs_coeff(&self) -> Rational {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_else(Rational::zero)
    }
}

impl Serialize for FockVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (p, c) in &self.terms {
            seq.serialize_element(&(p, c.to_string()))?;
        }
        seq.end()
    }
}

/// Applies the Heisenberg generator `a_k` (`k ≠ 0`).
pub fn heisenberg_apply(k: i64, kappa: &Rational, vec: &FockVector) -> Result<FockVector> {
    if k == 0 {
        return Err(QtError::Precondition("a_0 is not a generator here".into()));
    }
    let mode = k.unsigned_abs() as usize;
    let mut out = FockVector::zero();
    for (lambda, c) in vec.terms() {
        if k < 0 {
            out.add_term(lambda.union(&Partition::from_sorted(vec![mode])), c.clone());
        } else {
            let m = lambda.multiplicities().get(&mode).copied().unwrap_or(0);
            if m == 0 {
                continue;
            }
            let rest = lambda
                .remove_parts(&Partition::from_sorted(vec![mode]))
                .expect("part is present");
            out.add_term(rest, c * kappa * int(k) * int(m as i64));
        }
    }
    Ok(out)
}

/// Parameters of `V(z; s,t,u,w)` with central charge `κ`: creation
/// coefficients `u^k - w^k`, annihilation coefficients `t^k - s^k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VertexParams {
    #[serde(serialize_with = "ser_rational")]
    pub s: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub t: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub u: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub w: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub kappa: Rational,
}

impl VertexParams {
    pub fn new(s: Rational, t: Rational, u: Rational, w: Rational, kappa: Rational) -> Self {
        VertexParams { s, t, u, w, kappa }
    }

    /// The operator written `V(z; q_1,t_1,q_2,t_2)`, whose zero mode is
    /// `V_0(q_1,q_2,t_1,t_2)`: creation `q_1^k - q_2^k`, annihilation
    /// `t_2^k - t_1^k`.
    pub fn from_zero_mode_args(
        q1: Rational,
        q2: Rational,
        t1: Rational,
        t2: Rational,
        kappa: Rational,
    ) -> Self {
        VertexParams { s: t1, t: t2, u: q1, w: q2, kappa }
    }

    pub fn creation_coeff(&self, k: usize) -> Rational {
        pow_u(&self.u, k) - pow_u(&self.w, k)
    }

    pub fn annihilation_coeff(&self, k: usize) -> Rational {
        pow_u(&self.t, k) - pow_u(&self.s, k)
    }

    pub fn creation_coeffs(&self, max_mode: usize) -> Vec<Rational> {
        (0..=max_mode).map(|k| if k == 0 { Rational::zero() } else { self.creation_coeff(k) }).collect()
    }

    pub fn annihilation_coeffs(&self, max_mode: usize) -> Vec<Rational> {
        (0..=max_mode)
            .map(|k| if k == 0 { Rational::zero() } else { self.annihilation_coeff(k) })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::partitions_up_to;
    use crate::rational::rat;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn basic_actions() {
        let kappa = rat(3, 2);
        let out = heisenberg_apply(1, &kappa, &FockVector::basis(p(&[1]))).unwrap();
        assert_eq!(out, FockVector::vacuum().scale(&kappa));
        let out = heisenberg_apply(-2, &kappa, &FockVector::vacuum()).unwrap();
        assert_eq!(out, FockVector::basis(p(&[2])));
        assert!(heisenberg_apply(3, &kappa, &FockVector::vacuum()).unwrap().is_zero());
        assert!(heisenberg_apply(0, &kappa, &FockVector::vacuum()).is_err());
    }

    #[test]
    fn commutator_on_low_degrees() {
        let kappa = rat(-2, 3);
        for level in partitions_up_to(6) {
            for lambda in level {
                let v = FockVector::basis(lambda);
                for m in -6i64..=6 {
                    for n in -6i64..=6 {
                        if m == 0 || n == 0 {
                            continue;
                        }
                        let mn = heisenberg_apply(m, &kappa, &heisenberg_apply(n, &kappa, &v).unwrap())
                            .unwrap();
                        let nm = heisenberg_apply(n, &kappa, &heisenberg_apply(m, &kappa, &v).unwrap())
                            .unwrap();
                        let expect = if m == -n { v.scale(&(&kappa * int(m))) } else { FockVector::zero() };
                        assert_eq!(mn.sub(&nm), expect, "m = {m}, n = {n}");
                    }
                }
            }
        }
    }

    #[test]
    fn vector_bookkeeping() {
        let mut v = FockVector::basis(p(&[2, 1]));
        v.add_term(p(&[3]), rat(1, 2));
        assert_eq!(v.homogeneous_degree(), Some(3));
        v.add_term(p(&[2, 1]), int(-1));
        assert_eq!(v.len(), 1);
        v.add_term(p(&[1]), int(4));
        assert_eq!(v.homogeneous_degree(), None);
        assert_eq!(v.degree_part(1), FockVector::basis(p(&[1])).scale(&int(4)));
        assert_eq!(v.max_abs_coeff(), int(4));
    }

    #[test]
    fn parameter_identification() {
        let vp = VertexParams::from_zero_mode_args(rat(1, 2), int(1), rat(1, 3), int(1), int(1));
        assert_eq!(vp.creation_coeff(1), rat(-1, 2));
        assert_eq!(vp.annihilation_coeff(2), rat(8, 9));
    }
}
