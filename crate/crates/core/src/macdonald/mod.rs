//! Symmetric functions of low degree at specialised rational `(q, t)`:
//! power-sum/monomial transitions, the `q,t` inner product, Macdonald
//! polynomials and the modified basis that diagonalises `B̂_{q,t}`.

mod polys;
mod spectral;

use std::sync::{Arc, OnceLock};

use num::{One, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{QtError, Result};
use crate::linalg::RatMatrix;
use crate::partitions::{enumerate_partitions, Partition};
use crate::rational::{int, one_minus, pow_u, Rational};

pub use polys::{macdonald_j, macdonald_p, macdonald_p_family, modified_h_tilde, modified_h_tilde_family};
pub use spectral::{b_spectral_matrix, bhat_spectral_matrix, plethystic_twist, verify_vo, VoReport};

/// Largest degree handled by the symmetric-function toolkit.
pub const DEGREE_CAP: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Power,
    Monomial,
}

/// A homogeneous symmetric function of degree `d`, stored as coordinates
/// against the partitions of `d` in [`enumerate_partitions`] order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymFunc {
    degree: usize,
    basis: Basis,
    coeffs: Vec<Rational>,
}

impl SymFunc {
    pub fn zero(degree: usize, basis: Basis) -> Result<Self> {
        check_cap(degree)?;
        Ok(SymFunc { degree, basis, coeffs: vec![Rational::zero(); partition_count(degree)] })
    }

    /// The basis element indexed by `lambda` (`p_λ` or `m_λ`).
    pub fn basis_element(lambda: &Partition, basis: Basis) -> Result<Self> {
        let mut f = Self::zero(lambda.size(), basis)?;
        let i = index_of(lambda);
        f.coeffs[i] = Rational::one();
        Ok(f)
    }

    pub fn from_coords(degree: usize, basis: Basis, coeffs: Vec<Rational>) -> Result<Self> {
        check_cap(degree)?;
        if coeffs.len() != partition_count(degree) {
            return Err(QtError::SizeMismatch { left: coeffs.len(), right: partition_count(degree) });
        }
        Ok(SymFunc { degree, basis, coeffs })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn coords(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, lambda: &Partition) -> Rational {
        if lambda.size() != self.degree {
            return Rational::zero();
        }
        self.coeffs[index_of(lambda)].clone()
    }

    /// Nonzero coefficients keyed by partition.
    pub fn terms(&self) -> Vec<(Partition, Rational)> {
        enumerate_partitions(self.degree)
            .into_iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(p, c)| (p, c.clone()))
            .collect()
    }

    pub fn to_basis(&self, target: Basis) -> Result<SymFunc> {
        if target == self.basis {
            return Ok(self.clone());
        }
        let tr = transition(self.degree, self.basis, target)?;
        Ok(SymFunc { degree: self.degree, basis: target, coeffs: tr.matrix.apply(&self.coeffs) })
    }

    pub fn scale(&self, c: &Rational) -> SymFunc {
        SymFunc { coeffs: self.coeffs.iter().map(|x| x * c).collect(), ..self.clone() }
    }

    pub fn add(&self, other: &SymFunc) -> Result<SymFunc> {
        if self.degree != other.degree {
            return Err(QtError::SizeMismatch { left: self.degree, right: other.degree });
        }
        let other = other.to_basis(self.basis)?;
        Ok(SymFunc {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect(),
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &SymFunc) -> Result<SymFunc> {
        self.add(&other.scale(&int(-1)))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }
}

impl Serialize for SymFunc {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("SymFunc", 3)?;
        st.serialize_field("degree", &self.degree)?;
        st.serialize_field("basis", &self.basis)?;
        let terms: Vec<(Partition, String)> =
            self.terms().into_iter().map(|(p, c)| (p, c.to_string())).collect();
        st.serialize_field("terms", &terms)?;
        st.end()
    }
}

fn check_cap(degree: usize) -> Result<()> {
    if degree > DEGREE_CAP {
        Err(QtError::CapExceeded { degree, cap: DEGREE_CAP })
    } else {
        Ok(())
    }
}

fn partition_count(degree: usize) -> usize {
    enumerate_partitions(degree).len()
}

pub(crate) fn index_of(lambda: &Partition) -> usize {
    enumerate_partitions(lambda.size())
        .iter()
        .position(|p| p == lambda)
        .expect("every partition of d is enumerated")
}

/// Change of basis in one degree. Column `j` expands source element `j` in
/// the target basis, so target coordinates are `matrix · source coordinates`.
#[derive(Clone, Debug)]
pub struct TransitionMatrix {
    pub degree: usize,
    pub source: Basis,
    pub target: Basis,
    pub basis: Vec<Partition>,
    pub matrix: RatMatrix,
}

/// Number of ways to distribute the parts of `mu` over the rows of
/// `lambda` so that every row sum is exact; this is the coefficient of
/// `m_λ` in `p_μ`.
fn filling_count(parts: &[usize], rows: &mut [usize]) -> u64 {
    let Some((&first, rest)) = parts.split_first() else {
        return rows.iter().all(|&r| r == 0) as u64;
    };
    let mut total = 0;
    for j in 0..rows.len() {
        if rows[j] >= first {
            rows[j] -= first;
            total += filling_count(rest, rows);
            rows[j] += first;
        }
    }
    total
}

fn build_p_to_m(degree: usize) -> RatMatrix {
    let basis = enumerate_partitions(degree);
    let n = basis.len();
    let mut m = RatMatrix::zeros(n, n);
    for (j, mu) in basis.iter().enumerate() {
        for (i, lambda) in basis.iter().enumerate() {
            let mut rows = lambda.parts().to_vec();
            m[(i, j)] = int(filling_count(mu.parts(), &mut rows) as i64);
        }
    }
    m
}

type TransitionPair = (Arc<TransitionMatrix>, Arc<TransitionMatrix>);

fn cached_pair(degree: usize) -> Result<TransitionPair> {
    check_cap(degree)?;
    static CACHE: OnceLock<Vec<OnceLock<TransitionPair>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| (0..=DEGREE_CAP).map(|_| OnceLock::new()).collect());
    Ok(cache[degree]
        .get_or_init(|| {
            let basis = enumerate_partitions(degree);
            let p2m = build_p_to_m(degree);
            let m2p = p2m.inverse().expect("power sums form a basis over the rationals");
            let mk = |source, target, matrix| {
                Arc::new(TransitionMatrix { degree, source, target, basis: basis.clone(), matrix })
            };
            (mk(Basis::Power, Basis::Monomial, p2m), mk(Basis::Monomial, Basis::Power, m2p))
        })
        .clone())
}

/// `p_μ = Σ_λ R_{λμ} m_λ`, computed once per degree.
pub fn p_to_m(degree: usize) -> Result<Arc<TransitionMatrix>> {
    Ok(cached_pair(degree)?.0)
}

pub fn m_to_p(degree: usize) -> Result<Arc<TransitionMatrix>> {
    Ok(cached_pair(degree)?.1)
}

fn transition(degree: usize, source: Basis, target: Basis) -> Result<Arc<TransitionMatrix>> {
    match (source, target) {
        (Basis::Power, Basis::Monomial) => p_to_m(degree),
        (Basis::Monomial, Basis::Power) => m_to_p(degree),
        _ => unreachable!("identity transitions are handled by the caller"),
    }
}

/// `⟨p_λ, p_λ⟩_{q,t} = z_λ Π_i (1 - q^{λ_i}) / (1 - t^{λ_i})`.
pub fn qt_norm_power(lambda: &Partition, q: &Rational, t: &Rational) -> Result<Rational> {
    let z = Rational::from_integer(lambda.z_factor().into());
    lambda.parts().iter().try_fold(z, |acc, &k| {
        let den = one_minus(&pow_u(t, k));
        if den.is_zero() {
            return Err(QtError::Degenerate(format!("t^{k} = 1 makes the q,t pairing singular")));
        }
        Ok(acc * one_minus(&pow_u(q, k)) / den)
    })
}

/// The `q,t` inner product of two homogeneous symmetric functions.
pub fn qt_inner(f: &SymFunc, g: &SymFunc, q: &Rational, t: &Rational) -> Result<Rational> {
    if f.degree != g.degree {
        return Ok(Rational::zero());
    }
    let fp = f.to_basis(Basis::Power)?;
    let gp = g.to_basis(Basis::Power)?;
    let mut acc = Rational::zero();
    for (lambda, (a, b)) in enumerate_partitions(f.degree).iter().zip(fp.coeffs.iter().zip(&gp.coeffs)) {
        if a.is_zero() || b.is_zero() {
            continue;
        }
        acc += a * b * qt_norm_power(lambda, q, t)?;
    }
    Ok(acc)
}

/// `h_n = Σ_{μ ⊢ n} p_μ / z_μ` as a power-sum polynomial (all degrees mixed).
fn complete_power(n: usize) -> Vec<(Partition, Rational)> {
    enumerate_partitions(n)
        .into_iter()
        .map(|mu| {
            let z = Rational::from_integer(mu.z_factor().into());
            (mu, z.recip())
        })
        .collect()
}

fn poly_mul(a: &[(Partition, Rational)], b: &[(Partition, Rational)]) -> Vec<(Partition, Rational)> {
    let mut out: std::collections::BTreeMap<Partition, Rational> = Default::default();
    for (p, x) in a {
        for (r, y) in b {
            *out.entry(p.union(r)).or_insert_with(Rational::zero) += x * y;
        }
    }
    out.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// Schur function by the Jacobi–Trudi determinant `det(h_{λ_i - i + j})`.
pub fn schur(lambda: &Partition) -> Result<SymFunc> {
    check_cap(lambda.size())?;
    let l = lambda.length();
    let entry = |i: usize, j: usize| -> Vec<(Partition, Rational)> {
        let k = lambda.part(i + 1) as i64 - i as i64 + j as i64;
        if k < 0 {
            Vec::new()
        } else {
            complete_power(k as usize)
        }
    };
    let mut total: std::collections::BTreeMap<Partition, Rational> = Default::default();
    for (perm, sign) in signed_permutations(l) {
        let mut prod = vec![(Partition::empty(), Rational::one())];
        for (i, &j) in perm.iter().enumerate() {
            prod = poly_mul(&prod, &entry(i, j));
            if prod.is_empty() {
                break;
            }
        }
        for (p, c) in prod {
            *total.entry(p).or_insert_with(Rational::zero) += c * int(sign);
        }
    }
    let mut f = SymFunc::zero(lambda.size(), Basis::Power)?;
    for (p, c) in total {
        let i = index_of(&p);
        f.coeffs[i] = c;
    }
    Ok(f)
}

fn signed_permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    if n == 0 {
        return vec![(Vec::new(), 1)];
    }
    let mut out = Vec::new();
    for (p, s) in signed_permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            // inserting at `pos` passes over `len - pos` larger-indexed slots
            let flips = (p.len() - pos) as i64;
            out.push((q, if flips % 2 == 0 { s } else { -s }));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    #[test]
    fn low_degree_transitions() {
        let f = SymFunc::basis_element(&p(&[1]), Basis::Power).unwrap();
        assert_eq!(f.to_basis(Basis::Monomial).unwrap().coeff(&p(&[1])), int(1));
        let p11 = SymFunc::basis_element(&p(&[1, 1]), Basis::Power).unwrap().to_basis(Basis::Monomial).unwrap();
        assert_eq!((p11.coeff(&p(&[2])), p11.coeff(&p(&[1, 1]))), (int(1), int(2)));
        let p2 = SymFunc::basis_element(&p(&[2]), Basis::Power).unwrap().to_basis(Basis::Monomial).unwrap();
        assert_eq!((p2.coeff(&p(&[2])), p2.coeff(&p(&[1, 1]))), (int(1), int(0)));
    }

    #[test]
    fn transitions_round_trip() {
        for d in 0..=DEGREE_CAP {
            let a = p_to_m(d).unwrap();
            let b = m_to_p(d).unwrap();
            assert_eq!(&a.matrix * &b.matrix, RatMatrix::identity(a.basis.len()));
        }
        assert!(p_to_m(DEGREE_CAP + 1).is_err());
    }

    #[test]
    fn monomial_expansion_by_evaluation() {
        // p_{21} in three variables at x = (1,2,3): (1+4+9)(1+2+3) = 84;
        // m_3 = 36, m_21 = 48 at the same point.
        let f = SymFunc::basis_element(&p(&[2, 1]), Basis::Power).unwrap().to_basis(Basis::Monomial).unwrap();
        let m3 = int(36);
        let m21 = int(1 * 2 + 1 * 3 + 4 * 1 + 4 * 3 + 9 * 1 + 9 * 2);
        let m111 = int(6);
        let value = f.coeff(&p(&[3])) * m3 + f.coeff(&p(&[2, 1])) * m21 + f.coeff(&p(&[1, 1, 1])) * m111;
        assert_eq!(value, int(84));
    }

    #[test]
    fn inner_product_examples() {
        let (q, t) = (rat(1, 2), rat(1, 3));
        let p1 = SymFunc::basis_element(&p(&[1]), Basis::Power).unwrap();
        assert_eq!(qt_inner(&p1, &p1, &q, &t).unwrap(), rat(1, 2) / rat(2, 3));
        let p2 = SymFunc::basis_element(&p(&[2]), Basis::Power).unwrap();
        let p11 = SymFunc::basis_element(&p(&[1, 1]), Basis::Power).unwrap();
        assert!(qt_inner(&p2, &p11, &q, &t).unwrap().is_zero());
        assert_eq!(qt_inner(&p11, &p11, &q, &q).unwrap(), int(2));
        assert!(qt_inner(&p2, &p2, &q, &int(-1)).is_err());
    }

    #[test]
    fn schur_low_degree() {
        // s_2 = (p_1^2 + p_2)/2, s_11 = (p_1^2 - p_2)/2
        let s2 = schur(&p(&[2])).unwrap();
        assert_eq!((s2.coeff(&p(&[2])), s2.coeff(&p(&[1, 1]))), (rat(1, 2), rat(1, 2)));
        let s11 = schur(&p(&[1, 1])).unwrap();
        assert_eq!((s11.coeff(&p(&[2])), s11.coeff(&p(&[1, 1]))), (rat(-1, 2), rat(1, 2)));
        // Schur functions are monomial-unitriangular: s_λ = m_λ + lower terms
        for d in 1..=4 {
            for lambda in enumerate_partitions(d) {
                let m = schur(&lambda).unwrap().to_basis(Basis::Monomial).unwrap();
                assert_eq!(m.coeff(&lambda), int(1));
            }
        }
    }

    #[test]
    fn schur_orthonormal_under_hall_pairing() {
        let q = rat(2, 7);
        for lambda in enumerate_partitions(4) {
            for mu in enumerate_partitions(4) {
                let ip = qt_inner(&schur(&lambda).unwrap(), &schur(&mu).unwrap(), &q, &q).unwrap();
                assert_eq!(ip, if lambda == mu { int(1) } else { int(0) });
            }
        }
    }
}
