//! The vertex operator's exponentials, its zero mode and one-vertex traces.

use std::collections::BTreeMap;

use num::{One, Zero};
use rayon::prelude::*;

use super::{FockVector, VertexParams};
use crate::correlators::euler_product;
use crate::error::{QtError, Result};
use crate::linalg::RatMatrix;
use crate::partitions::{enumerate_partitions, Partition};
use crate::qseries::{pochhammer_inf_shifted, VSeries};
use crate::rational::{int, pow_u, Rational};

/// Nonzero terms of `exp(Σ_k c_k p_k / k)` by degree: `Π_i c_{ν_i} / z_ν · p_ν`.
/// `coeffs[k]` holds `c_k`; entry 0 is ignored.
pub fn creation_terms(coeffs: &[Rational], max_degree: usize) -> Vec<Vec<(Partition, Rational)>> {
    assert!(coeffs.len() > max_degree, "need creation coefficients up to the degree cap");
    (0..=max_degree)
        .map(|d| {
            enumerate_partitions(d)
                .into_iter()
                .filter_map(|nu| {
                    let prod = nu.parts().iter().fold(Rational::one(), |acc, &k| acc * &coeffs[k]);
                    if prod.is_zero() {
                        return None;
                    }
                    let z = Rational::from_integer(nu.z_factor().into());
                    Some((nu, prod / z))
                })
                .collect()
        })
        .collect()
}

/// Multiplies by the creation exponential, dropping output above `max_degree`.
pub fn apply_creation(
    vec: &FockVector,
    terms: &[Vec<(Partition, Rational)>],
    max_degree: usize,
) -> FockVector {
    let mut out = FockVector::zero();
    for (mu, c) in vec.terms() {
        let room = max_degree.saturating_sub(mu.size());
        if mu.size() > max_degree {
            continue;
        }
        for level in terms.iter().take(room + 1) {
            for (nu, e) in level {
                out.add_term(mu.union(nu), c * e);
            }
        }
    }
    out
}

/// `Π_r C(m_r, n_r) (κ b_r)^{n_r}` for the removed multiset `rho ⊆ mu`.
pub(super) fn shift_weight(mu: &Partition, rho: &Partition, b: &[Rational], kappa: &Rational) -> Rational {
    let mm = mu.multiplicities();
    rho.multiplicities().iter().fold(Rational::one(), |acc, (&r, &n)| {
        let m = mm[&r];
        acc * binomial(m, n) * pow_u(&(kappa * &b[r]), n)
    })
}

pub(super) fn binomial(m: usize, n: usize) -> Rational {
    let mut acc = Rational::one();
    for i in 0..n {
        acc = acc * int((m - i) as i64) / int((i + 1) as i64);
    }
    acc
}

/// Applies the annihilation exponential, i.e. the shift `p_k ↦ p_k + κ b_k`.
/// `b[k]` must be present for every part size in `vec`.
pub fn apply_annihilation(vec: &FockVector, b: &[Rational], kappa: &Rational) -> FockVector {
    let mut out = FockVector::zero();
    for (mu, c) in vec.terms() {
        for rho in mu.sub_multisets() {
            let w = shift_weight(mu, &rho, b, kappa);
            if w.is_zero() {
                continue;
            }
            out.add_term(mu.remove_parts(&rho).expect("sub-multiset"), c * w);
        }
    }
    out
}

/// The zero mode `V_0`: the degree-preserving part of `V(1)`.
pub fn vertex_zero_mode_apply(params: &VertexParams, vec: &FockVector, degree_cap: usize) -> Result<FockVector> {
    if let Some((mu, _)) = vec.terms().find(|(mu, _)| mu.size() > degree_cap) {
        return Err(QtError::CapExceeded { degree: mu.size(), cap: degree_cap });
    }
    let b = params.annihilation_coeffs(degree_cap);
    let terms = creation_terms(&params.creation_coeffs(degree_cap), degree_cap);
    Ok(zero_mode_with(vec, &b, &terms, &params.kappa))
}

fn zero_mode_with(
    vec: &FockVector,
    b: &[Rational],
    terms: &[Vec<(Partition, Rational)>],
    kappa: &Rational,
) -> FockVector {
    let mut out = FockVector::zero();
    for (mu, c) in vec.terms() {
        for rho in mu.sub_multisets() {
            let w = shift_weight(mu, &rho, b, kappa);
            if w.is_zero() {
                continue;
            }
            let rest = mu.remove_parts(&rho).expect("sub-multiset");
            let cw = c * w;
            for (nu, e) in &terms[rho.size()] {
                out.add_term(rest.union(nu), &cw * e);
            }
        }
    }
    out
}

/// `V_0` on the degree-`d` subspace; column `j` is `V_0 p_{basis[j]}`.
#[derive(Clone, Debug)]
pub struct ZeroModeMatrix {
    pub basis: Vec<Partition>,
    pub matrix: RatMatrix,
}

pub fn zero_mode_matrix(params: &VertexParams, d: usize) -> ZeroModeMatrix {
    let basis = enumerate_partitions(d);
    let b = params.annihilation_coeffs(d);
    let terms = creation_terms(&params.creation_coeffs(d), d);
    let index: BTreeMap<&Partition, usize> = basis.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut matrix = RatMatrix::zeros(basis.len(), basis.len());
    for (j, mu) in basis.iter().enumerate() {
        let image = zero_mode_with(&FockVector::basis(mu.clone()), &b, &terms, &params.kappa);
        for (nu, c) in image.terms() {
            matrix[(index[nu], j)] = c.clone();
        }
    }
    ZeroModeMatrix { basis, matrix }
}

/// `Tr(v^{L_0} V_0)` from the diagonal of the zero-mode matrices.
pub fn v0_trace_direct(params: &VertexParams, order: usize) -> VSeries {
    let coeffs = (0..=order)
        .into_par_iter()
        .map(|d| zero_mode_matrix(params, d).matrix.trace())
        .collect();
    VSeries::from_coeffs(coeffs)
}

/// `Tr(v^{L_0} V_0)` by projecting `V_0 p_λ` onto `p_λ`:
/// `Σ_λ v^{|λ|} Π_r Σ_{n ≤ m_r} C(m_r, n) (κ c_r b_r)^n / (r^n n!)`.
pub fn v0_trace_projection(params: &VertexParams, order: usize) -> VSeries {
    let cb: Vec<Rational> = (0..=order)
        .map(|r| if r == 0 { Rational::zero() } else { params.creation_coeff(r) * params.annihilation_coeff(r) })
        .collect();
    let coeffs = (0..=order)
        .into_par_iter()
        .map(|d| {
            enumerate_partitions(d).iter().fold(Rational::zero(), |acc, lambda| {
                let diag = lambda.multiplicities().iter().fold(Rational::one(), |prod, (&r, &m)| {
                    let x = &params.kappa * &cb[r] / int(r as i64);
                    let mut inner = Rational::zero();
                    let mut x_pow_over_fact = Rational::one();
                    for n in 0..=m {
                        inner += binomial(m, n) * &x_pow_over_fact;
                        x_pow_over_fact = x_pow_over_fact * &x / int((n + 1) as i64);
                    }
                    prod * inner
                });
                acc + diag
            })
        })
        .collect();
    VSeries::from_coeffs(coeffs)
}

/// `Tr(v^{L_0} V_0)`; the projection route, which is the cheaper one.
pub fn v0_trace(params: &VertexParams, order: usize) -> VSeries {
    v0_trace_projection(params, order)
}

/// `⟨V_0⟩_v = [(usv)_∞ (wtv)_∞ / ((utv)_∞ (wsv)_∞)]^κ`.
pub fn zero_mode_expectation_closed(params: &VertexParams, order: usize) -> Result<VSeries> {
    let VertexParams { s, t, u, w, kappa } = params;
    let num = &pochhammer_inf_shifted(&(u * s), 1, order) * &pochhammer_inf_shifted(&(w * t), 1, order);
    let den = &pochhammer_inf_shifted(&(u * t), 1, order) * &pochhammer_inf_shifted(&(w * s), 1, order);
    num.div(&den)?.pow_rational(kappa)
}

/// `(v)_∞ · Tr(v^{L_0} V_0)`, the normalised zero-mode trace.
pub fn zero_mode_expectation_brute(params: &VertexParams, order: usize) -> VSeries {
    &euler_product(order) * &v0_trace(params, order)
}

/// Checks `exp(A_i) exp(C_j) = exp(κ Σ_k b^i_k c^j_k ζ^k / k) exp(C_j) exp(A_i)`
/// on every `p_λ` with `|λ| ≤ degree_cap`, modulo `ζ^{zeta_order+1}`, where
/// `A_i` is the annihilation exponent of `params_i` at `z_i = 1` and `C_j` the
/// creation exponent of `params_j` at `z_j = ζ`. Returns the largest
/// coefficient deviation.
pub fn normal_order_check(
    params_i: &VertexParams,
    params_j: &VertexParams,
    zeta_order: usize,
    degree_cap: usize,
) -> Result<Rational> {
    if params_i.kappa != params_j.kappa {
        return Err(QtError::Precondition("both factors must share κ".into()));
    }
    let kappa = &params_i.kappa;
    let k = zeta_order;
    let b = params_i.annihilation_coeffs(degree_cap + k);
    let c = params_j.creation_coeffs(k);
    let terms = creation_terms(&c, k);

    // exp(κ Σ_k b_k c_k ζ^k / k) as a polynomial in ζ
    let log_scalar: Vec<Rational> = (0..=k)
        .map(|m| if m == 0 { Rational::zero() } else { kappa * &b[m] * &c[m] / int(m as i64) })
        .collect();
    let scalar = VSeries::from_coeffs(log_scalar).exp()?;

    let deviations = (0..=degree_cap)
        .into_par_iter()
        .map(|d| {
            let mut worst = Rational::zero();
            for lambda in enumerate_partitions(d) {
                let start = FockVector::basis(lambda);
                // left side: create first (ζ-degree = created degree), then shift
                let mut lhs: Vec<FockVector> = vec![FockVector::zero(); k + 1];
                for (e, level) in terms.iter().enumerate() {
                    let mut created = FockVector::zero();
                    for (nu, x) in level {
                        for (mu, y) in start.terms() {
                            created.add_term(mu.union(nu), x * y);
                        }
                    }
                    lhs[e] = apply_annihilation(&created, &b, kappa);
                }
                // right side: shift, create, then multiply by the scalar
                let shifted = apply_annihilation(&start, &b, kappa);
                let mut rhs: Vec<FockVector> = vec![FockVector::zero(); k + 1];
                for (a, level) in terms.iter().enumerate() {
                    let mut created = FockVector::zero();
                    for (nu, x) in level {
                        for (mu, y) in shifted.terms() {
                            created.add_term(mu.union(nu), x * y);
                        }
                    }
                    for s in 0..=k - a {
                        let sc = scalar.coeff(s);
                        if !sc.is_zero() {
                            rhs[a + s] = rhs[a + s].add(&created.scale(sc));
                        }
                    }
                }
                for e in 0..=k {
                    let dev = lhs[e].sub(&rhs[e]).max_abs_coeff();
                    if dev > worst {
                        worst = dev;
                    }
                }
            }
            worst
        })
        .collect::<Vec<_>>();
    Ok(deviations.into_iter().max().unwrap_or_else(Rational::zero))
}
