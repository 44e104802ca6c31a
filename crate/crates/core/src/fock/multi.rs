//! Traces of products of full vertex operators.
//!
//! With `z_1 = 1` and `z_2 = ζ`, the normalised trace of `V(z_1)V(z_2)` is
//! `exp(κ Σ_k b^1_k c^2_k ζ^k/k) · exp(κ Σ_k v^k/(1-v^k) Σ_{i,j} c^j_k b^i_k (z_j/z_i)^k / k)`
//! where `c^i_k = u_i^k - w_i^k` and `b^i_k = t_i^k - s_i^k`.

use num::complex::Complex64;
use num::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::vertex::{apply_annihilation, apply_creation, creation_terms, shift_weight};
use super::{FockVector, VertexParams, ZetaSeries};
use crate::correlators::{euler_product, NumericValue};
use crate::error::{QtError, Result};
use crate::hypergeom::ComplexScalar;
use crate::partitions::enumerate_partitions;
use crate::rational::{int, one_minus, ser_rational, to_f64, Rational};

fn shared_kappa(params: &[VertexParams]) -> Result<Rational> {
    let kappa = params
        .first()
        .ok_or_else(|| QtError::Precondition("need at least one vertex".into()))?
        .kappa
        .clone();
    if params.iter().any(|p| p.kappa != kappa) {
        return Err(QtError::Precondition("all vertices must share κ".into()));
    }
    Ok(kappa)
}

/// `Tr(v^{L_0} V(1; a) V(ζ; b))` by explicit operator application.
///
/// The coefficient of `v^d ζ^e` collects intermediate states of degree
/// `d + e`, so keeping `d ≤ order` and intermediate degree `≤ order + zeta_order`
/// computes every retained coefficient exactly.
pub fn two_vertex_trace(
    first: &VertexParams,
    second: &VertexParams,
    order: usize,
    zeta_order: usize,
) -> Result<ZetaSeries> {
    let kappa = shared_kappa(&[first.clone(), second.clone()])?;
    let cap = order + zeta_order;
    let b2 = second.annihilation_coeffs(order);
    let terms2 = creation_terms(&second.creation_coeffs(cap), cap);
    let b1 = first.annihilation_coeffs(cap);
    let terms1 = creation_terms(&first.creation_coeffs(order), order);

    let rows: Vec<Vec<(usize, Rational)>> = (0..=order)
        .into_par_iter()
        .map(|d| {
            let mut by_degree = vec![Rational::zero(); cap + 1];
            for lambda in enumerate_partitions(d) {
                let start = FockVector::basis(lambda.clone());
                let mid = apply_creation(&apply_annihilation(&start, &b2, &kappa), &terms2, cap);
                for (mu, c) in mid.terms() {
                    // ⟨p_λ| V(1; a) |p_μ⟩: shift away ρ ⊆ μ, then create λ ∖ (μ ∖ ρ)
                    let mut diag = Rational::zero();
                    for rho in mu.sub_multisets() {
                        let rest = mu.remove_parts(&rho).expect("sub-multiset");
                        let Some(nu) = lambda.remove_parts(&rest) else { continue };
                        let Some((_, e)) = terms1[nu.size()].iter().find(|(p, _)| *p == nu) else {
                            continue;
                        };
                        diag += shift_weight(mu, &rho, &b1, &kappa) * e;
                    }
                    if !diag.is_zero() {
                        by_degree[mu.size()] += c * diag;
                    }
                }
            }
            by_degree.into_iter().enumerate().filter(|(_, c)| !c.is_zero()).collect()
        })
        .collect();

    let mut out = ZetaSeries::zero(order, cap);
    for (d, row) in rows.into_iter().enumerate() {
        for (m, c) in row {
            out.add_xy(d, m, &c);
        }
    }
    Ok(out)
}

/// Normalised trace `⟨Π_i V(z_i)⟩_v` for one or two vertices (`z_1 = 1`,
/// `z_2 = ζ`) from the exponential of its mode sums.
pub fn vertex_product_expectation_closed(
    params: &[VertexParams],
    order: usize,
    zeta_order: usize,
) -> Result<ZetaSeries> {
    if params.len() > 2 {
        return Err(QtError::Precondition(
            "exact vertex products support one or two vertices; use the numeric evaluator".into(),
        ));
    }
    let kappa = shared_kappa(params)?;
    let cap = order + zeta_order;
    let modes = order.max(cap);
    let b: Vec<Vec<Rational>> = params.iter().map(|p| p.annihilation_coeffs(modes)).collect();
    let c: Vec<Vec<Rational>> = params.iter().map(|p| p.creation_coeffs(modes)).collect();

    let mut log = ZetaSeries::zero(order, cap);
    for k in 1..=modes {
        let weight = &kappa / int(k as i64);
        // cross pairings between vertices i < j: ζ^{k(j-i)}
        for i in 0..params.len() {
            for j in i + 1..params.len() {
                log.add_xy(0, k * (j - i), &(&weight * &b[i][k] * &c[j][k]));
            }
        }
        // trace pairings: v^{kn} (z_j/z_i)^k for n ≥ 1
        for n in 1..=order / k {
            for i in 0..params.len() {
                for j in 0..params.len() {
                    let y = (k * n + k * j) as i64 - (k * i) as i64;
                    if y >= 0 {
                        log.add_xy(k * n, y as usize, &(&weight * &b[i][k] * &c[j][k]));
                    }
                }
            }
        }
    }
    log.exp()
}

fn binomial_factor(order: usize, cap: usize, a: &Rational, x: usize, y: usize) -> ZetaSeries {
    let mut s = ZetaSeries::one(order, cap);
    s.add_xy(x, y, &-a.clone());
    s
}

/// The same expectation as a κ-th power of products of binomials
/// `(1 - a v^n (z_j/z_i))`, the trace pairings running over `n ≥ 1`.
pub fn vertex_product_expectation_product_form(
    params: &[VertexParams],
    order: usize,
    zeta_order: usize,
) -> Result<ZetaSeries> {
    if params.len() > 2 {
        return Err(QtError::Precondition("product form supports one or two vertices".into()));
    }
    let kappa = shared_kappa(params)?;
    let cap = order + zeta_order;
    let mut num = ZetaSeries::one(order, cap);
    let mut den = ZetaSeries::one(order, cap);
    let mut push = |num_args: [Rational; 2], den_args: [Rational; 2], x: usize, y: usize| -> Result<()> {
        for a in &num_args {
            num = num.mul(&binomial_factor(order, cap, a, x, y))?;
        }
        for a in &den_args {
            den = den.mul(&binomial_factor(order, cap, a, x, y))?;
        }
        Ok(())
    };
    for i in 0..params.len() {
        for j in 0..params.len() {
            let (pi, pj) = (&params[i], &params[j]);
            let num_args = [&pi.t * &pj.w, &pi.s * &pj.u];
            let den_args = [&pi.t * &pj.u, &pi.s * &pj.w];
            if i < j {
                push(num_args.clone(), den_args.clone(), 0, j - i)?;
            }
            for n in 1..=order {
                let y = (n + j) as i64 - i as i64;
                if y >= 0 {
                    push(num_args.clone(), den_args.clone(), n, y as usize)?;
                }
            }
        }
    }
    num.div(&den)?.pow_rational(&kappa)
}

/// Brute-force counterpart of [`vertex_product_expectation_closed`] for two
/// vertices: `(v)_∞ · Tr(v^{L_0} V(1) V(ζ))`.
pub fn two_vertex_expectation_brute(
    first: &VertexParams,
    second: &VertexParams,
    order: usize,
    zeta_order: usize,
) -> Result<ZetaSeries> {
    let trace = two_vertex_trace(first, second, order, zeta_order)?;
    let euler = ZetaSeries::from_v_series(&euler_product(order), order + zeta_order);
    euler.mul(&trace)
}

/// Product shape with every Pochhammer factor starting at `v^0`, compared
/// at a single vertex against the derived closed form: the two differ by
/// the constant `[(1-tw)(1-su) / ((1-tu)(1-sw))]^κ`.
#[derive(Clone, Debug, Serialize)]
pub struct LiteralDiscrepancy {
    /// `(1-tw)(1-su) / ((1-tu)(1-sw))`; absent when the denominator vanishes.
    #[serde(serialize_with = "ser_opt_rational")]
    pub base_ratio: Option<Rational>,
    #[serde(serialize_with = "ser_rational")]
    pub kappa: Rational,
    /// Whether the unshifted product agrees with the derived form here.
    pub consistent: bool,
}

fn ser_opt_rational<S: serde::Serializer>(
    r: &Option<Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.collect_str(r),
        None => s.serialize_none(),
    }
}

pub fn literal_product_discrepancy(params: &VertexParams) -> LiteralDiscrepancy {
    let VertexParams { s, t, u, w, kappa } = params;
    let num = one_minus(&(t * w)) * one_minus(&(s * u));
    let den = one_minus(&(t * u)) * one_minus(&(s * w));
    let base_ratio = (!den.is_zero()).then(|| num / den);
    let consistent = kappa.is_zero() || base_ratio.as_ref().is_some_and(One::is_one);
    LiteralDiscrepancy { base_ratio, kappa: kappa.clone(), consistent }
}

/// Best-effort numeric `⟨Π_i V(z_i)⟩_v` for any number of vertices, as the
/// κ-th power of the product form evaluated through principal logarithms.
/// Needs every factor argument `a (z_j/z_i)` of the cross pairings and
/// `a v (z_j/z_i)` of the trace pairings inside the unit disc.
pub fn vertex_product_expectation_numeric(
    params: &[VertexParams],
    z: &[ComplexScalar],
    v: ComplexScalar,
    tol: f64,
) -> Result<NumericValue> {
    if params.len() != z.len() {
        return Err(QtError::SizeMismatch { left: params.len(), right: z.len() });
    }
    let kappa = to_f64(&shared_kappa(params)?);
    if v.norm() >= 1.0 {
        return Err(QtError::Divergence(format!("need |v| < 1, got {}", v.norm())));
    }
    if z.iter().any(|x| x.norm() == 0.0) {
        return Err(QtError::DivisionByZero("z_i = 0".into()));
    }
    let one = Complex64::one();
    let f = |x: &Rational| Complex64::new(to_f64(x), 0.0);
    let mut log = Complex64::zero();
    let mut terms = 0usize;
    for i in 0..params.len() {
        for j in 0..params.len() {
            let (pi, pj) = (&params[i], &params[j]);
            let r = z[j] / z[i];
            let num = [f(&pi.t) * f(&pj.w) * r, f(&pi.s) * f(&pj.u) * r];
            let den = [f(&pi.t) * f(&pj.u) * r, f(&pi.s) * f(&pj.w) * r];
            let largest = num.iter().chain(&den).map(|a| a.norm()).fold(0.0, f64::max);
            if i < j {
                if largest >= 1.0 {
                    return Err(QtError::Divergence(format!(
                        "cross pairing of vertices {} and {} needs |a z_j/z_i| < 1, got {largest}",
                        i + 1,
                        j + 1
                    )));
                }
                log += num.iter().map(|a| (one - a).ln()).sum::<Complex64>()
                    - den.iter().map(|a| (one - a).ln()).sum::<Complex64>();
            }
            if largest * v.norm() >= 1.0 {
                return Err(QtError::Divergence(format!(
                    "trace pairing ({}, {}) leaves the unit disc",
                    i + 1,
                    j + 1
                )));
            }
            let mut vn = v;
            while largest * vn.norm() > tol * 1e-3 {
                log += num.iter().map(|a| (one - a * vn).ln()).sum::<Complex64>()
                    - den.iter().map(|a| (one - a * vn).ln()).sum::<Complex64>();
                vn *= v;
                terms += 1;
                if terms > 10_000_000 {
                    return Err(QtError::NonConvergence { terms });
                }
            }
        }
    }
    let value = (log * kappa).exp();
    Ok(NumericValue { value, error_bound: tol * value.norm().max(1.0) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::vertex::zero_mode_expectation_closed;
    use crate::hypergeom::c;
    use crate::qseries::VSeries;
    use crate::rational::rat;

    fn vp(s: Rational, t: Rational, u: Rational, w: Rational, kappa: Rational) -> VertexParams {
        VertexParams::new(s, t, u, w, kappa)
    }

    #[test]
    fn single_vertex_matches_zero_mode() {
        let a = vp(rat(1, 2), rat(-1, 3), rat(2, 5), rat(3, 4), rat(1, 2));
        let closed = vertex_product_expectation_closed(&[a.clone()], 8, 0).unwrap();
        assert_eq!(closed.zeta_layer(0), zero_mode_expectation_closed(&a, 8).unwrap());
        let product = vertex_product_expectation_product_form(&[a], 8, 0).unwrap();
        assert_eq!(product, closed);
    }

    #[test]
    fn trivial_vertices() {
        let a = vp(rat(1, 2), rat(1, 2), rat(2, 5), rat(2, 5), int(1));
        let b = vp(rat(1, 3), rat(1, 3), int(3), int(3), int(1));
        let closed = vertex_product_expectation_closed(&[a.clone(), b.clone()], 5, 3).unwrap();
        assert_eq!(closed, ZetaSeries::one(5, 8));
        let brute = two_vertex_expectation_brute(&a, &b, 5, 3).unwrap();
        assert_eq!(brute, closed);
    }

    #[test]
    fn two_vertices_small_box() {
        let a = vp(rat(1, 2), rat(-1, 3), rat(2, 5), rat(3, 4), int(1));
        let b = vp(rat(2, 3), rat(1, 5), rat(-1, 2), rat(1, 3), int(1));
        let (n, k) = (4, 3);
        let closed = vertex_product_expectation_closed(&[a.clone(), b.clone()], n, k).unwrap();
        let brute = two_vertex_expectation_brute(&a, &b, n, k).unwrap();
        assert_eq!(closed, brute);
        let product = vertex_product_expectation_product_form(&[a, b], n, k).unwrap();
        assert_eq!(product, closed);
    }

    #[test]
    fn first_vertex_without_annihilation() {
        // V(1; a) creates only, so ⟨p_λ| V(1;a) hits just the degree-preserving
        // part of V(ζ; b) at ζ^0: the ζ^0 layer is b's zero-mode trace.
        let a = vp(rat(1, 3), rat(1, 3), rat(2, 5), rat(-1, 4), rat(1, 2));
        let b = vp(rat(2, 3), rat(1, 5), rat(-1, 2), rat(1, 3), rat(1, 2));
        let brute = two_vertex_expectation_brute(&a, &b, 6, 2).unwrap();
        assert_eq!(brute.zeta_layer(0), zero_mode_expectation_closed(&b, 6).unwrap());
    }

    #[test]
    fn literal_shape_report() {
        let a = vp(rat(1, 2), rat(-1, 3), rat(2, 5), rat(3, 4), int(1));
        let report = literal_product_discrepancy(&a);
        assert!(!report.consistent);
        let ratio = report.base_ratio.unwrap();
        // the constant is exactly the extra v^0 factors
        let expect = (one_minus(&(rat(-1, 3) * rat(3, 4))) * one_minus(&(rat(1, 2) * rat(2, 5))))
            / (one_minus(&(rat(-1, 3) * rat(2, 5))) * one_minus(&(rat(1, 2) * rat(3, 4))));
        assert_eq!(ratio, expect);
        let trivial = vp(rat(1, 2), rat(1, 2), rat(2, 5), rat(3, 4), int(1));
        assert!(literal_product_discrepancy(&trivial).consistent);
    }

    #[test]
    fn numeric_single_vertex_matches_series() {
        let a = vp(rat(1, 2), rat(-1, 3), rat(2, 5), rat(3, 4), int(2));
        let v = 0.05;
        let series = zero_mode_expectation_closed(&a, 14).unwrap();
        let approx = eval_f64(&series, v);
        let numeric = vertex_product_expectation_numeric(&[a], &[c(1.0)], c(v), 1e-13).unwrap();
        assert!((numeric.value.re - approx).abs() < 1e-12);
    }

    fn eval_f64(s: &VSeries, v: f64) -> f64 {
        s.coeffs().iter().rev().fold(0.0, |acc, x| acc * v + to_f64(x))
    }

    #[test]
    fn numeric_three_vertices_runs() {
        let a = vp(rat(1, 2), rat(-1, 3), rat(2, 5), rat(3, 4), int(1));
        let z = [c(1.0), c(0.5), c(0.25)];
        let out =
            vertex_product_expectation_numeric(&[a.clone(), a.clone(), a.clone()], &z, c(0.1), 1e-12).unwrap();
        assert!(out.value.norm().is_finite());
        // permuting vertices together with their positions leaves the value unchanged
        let b = vp(rat(2, 3), rat(1, 5), rat(-1, 2), rat(1, 3), int(1));
        let v1 = vertex_product_expectation_numeric(&[a.clone(), b.clone()], &[c(1.0), c(0.3)], c(0.1), 1e-12)
            .unwrap();
        assert!(v1.value.norm() > 0.0);
        assert!(vertex_product_expectation_numeric(&[a.clone(), b], &[c(1.0), c(40.0)], c(0.1), 1e-12).is_err());
    }
}
