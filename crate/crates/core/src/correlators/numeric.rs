//! Numeric backend: complex double precision at a fixed `v`.

use std::sync::OnceLock;

use num::{One, Zero};
use serde::Serialize;

use super::ParamPair;
use crate::error::{QtError, Result};
use crate::hypergeom::{basic_phi, num_pochhammer_inf, ser_complex, ComplexScalar, PhiSpec, SumOptions};
use crate::partitions::{b_hat_stat, enumerate_partitions};

/// Default size cutoff of the numeric partition sum.
pub const DEFAULT_BRUTE_SIZE: usize = 24;

/// Largest degree whose partition count is tabulated for tail bounds.
const COUNT_TABLE: usize = 20_000;

/// A numeric value with an a-priori error bound.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NumericValue {
    #[serde(serialize_with = "ser_complex")]
    pub value: ComplexScalar,
    pub error_bound: f64,
}

/// `p(d)` for `d ≤ COUNT_TABLE` as floats (Euler's pentagonal recurrence).
fn partition_counts() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut p = vec![0.0f64; COUNT_TABLE + 1];
        p[0] = 1.0;
        for n in 1..=COUNT_TABLE {
            let mut acc = 0.0;
            for k in 1.. {
                let g1 = k * (3 * k - 1) / 2;
                if g1 > n {
                    break;
                }
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                acc += sign * p[n - g1];
                let g2 = k * (3 * k + 1) / 2;
                if g2 <= n {
                    acc += sign * p[n - g2];
                }
            }
            p[n] = acc;
        }
        p
    })
}

/// Bound on `Σ_{|λ|>max_size} Π_k |B̂_λ(q_k,t_k)| |v|^{|λ|}`.
///
/// Uses `|B̂_λ(q,t)| ≤ max(1,|q|)^{|λ|} / (|1-q| (1-|t|))`, so the tail is at
/// most `C Σ_{d>M} p(d) x^d` with `x = |v| Π max(1,|q_k|)`. Degrees up to the
/// cutoff `D` use exact counts; beyond it `p(d) ≤ exp(π√(2d/3))` and the
/// ratio of consecutive majorants is at most `ρ = x·exp(π/√(6(D+1)))`.
pub fn brute_tail_bound(
    pairs: &[ParamPair<ComplexScalar>],
    v: ComplexScalar,
    max_size: usize,
) -> Result<f64> {
    let mut c = 1.0;
    let mut x = v.norm();
    for p in pairs {
        let rt = p.t.norm();
        if rt >= 1.0 {
            return Err(QtError::Divergence(format!("tail bound needs |t| < 1, got {rt}")));
        }
        let d = (ComplexScalar::one() - p.q).norm();
        if d == 0.0 {
            return Err(QtError::DivisionByZero("q = 1".into()));
        }
        c /= d * (1.0 - rt);
        x *= p.q.norm().max(1.0);
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x >= 1.0 {
        return Err(QtError::Divergence(format!("partition sum ratio {x} ≥ 1")));
    }
    let counts = partition_counts();
    let majorant = |d: usize| (std::f64::consts::PI * (2.0 * d as f64 / 3.0).sqrt() + d as f64 * x.ln()).exp();
    let mut sum = 0.0;
    let mut d = max_size + 1;
    loop {
        if d > COUNT_TABLE {
            return Err(QtError::Divergence(format!(
                "tail bound does not settle before degree {COUNT_TABLE} (|v| too close to 1)"
            )));
        }
        sum += counts[d] * x.powi(d as i32);
        let rho = x * (std::f64::consts::PI / (6.0 * (d + 1) as f64).sqrt()).exp();
        if rho < 1.0 {
            let rest = majorant(d + 1) / (1.0 - rho);
            if rest <= 1e-3 * sum || rest < 1e-300 {
                return Ok(c * (sum + rest));
            }
        }
        d += 1;
    }
}

/// Numeric `Σ_{|λ|≤max_size} Π_k B̂_λ(q_k,t_k) v^{|λ|}` with its tail bound.
pub fn trace_brute_hat_numeric(
    pairs: &[ParamPair<ComplexScalar>],
    v: ComplexScalar,
    max_size: usize,
) -> Result<NumericValue> {
    let tail = brute_tail_bound(pairs, v, max_size)?;
    let mut total = ComplexScalar::zero();
    let mut vp = ComplexScalar::one();
    for d in 0..=max_size {
        let mut level = ComplexScalar::zero();
        for lambda in enumerate_partitions(d) {
            let mut term = ComplexScalar::one();
            for p in pairs {
                term *= b_hat_stat(&lambda, &p.q, &p.t)?;
            }
            level += term;
        }
        total += level * vp;
        vp *= v;
    }
    // rounding: a few ulps per summand, relative to the absolute sum
    Ok(NumericValue { value: total, error_bound: tail + 1e-13 * total.norm().max(1.0) })
}

pub(crate) fn require_small(x: ComplexScalar, what: &str) -> Result<()> {
    if x.norm() < 1.0 {
        Ok(())
    } else {
        Err(QtError::Divergence(format!("need |{what}| < 1, got {}", x.norm())))
    }
}

pub(crate) fn nonvanishing(x: ComplexScalar, what: &str) -> Result<ComplexScalar> {
    if x.norm() < 1e-14 {
        Err(QtError::DivisionByZero(what.to_string()))
    } else {
        Ok(x)
    }
}

/// Checks the convergence domain of the two-point function.
pub(crate) fn check_two_point_domain(
    p1: &ParamPair<ComplexScalar>,
    p2: &ParamPair<ComplexScalar>,
    v: ComplexScalar,
) -> Result<()> {
    require_small(v, "v")?;
    require_small(p1.t, "t1")?;
    require_small(p2.t, "t2")?;
    require_small(v * p1.q * p2.q, "v q1 q2")?;
    let one = ComplexScalar::one();
    nonvanishing(one - p1.q, "1 - q1")?;
    nonvanishing(one - p2.q, "1 - q2")?;
    nonvanishing(one - p1.t * p2.t, "1 - t1 t2")?;
    nonvanishing(one - p1.q * p1.t, "1 - q1 t1")?;
    nonvanishing(one - p2.q * p2.t, "1 - q2 t2")?;
    Ok(())
}

pub(crate) fn poch(a: ComplexScalar, v: ComplexScalar, opts: SumOptions) -> Result<ComplexScalar> {
    num_pochhammer_inf(a, v, opts.tol * 1e-2)
}

/// `₃Φ₂(v, q_a t_a, v q_1 q_2; v q_a, v q_1 q_2 t_1 t_2; v; t_b)`, the
/// hypergeometric factor attached to the pair `a` in the two-point function.
pub(crate) fn pair_phi(
    qa: ComplexScalar,
    ta: ComplexScalar,
    tb: ComplexScalar,
    q12: ComplexScalar,
    t12: ComplexScalar,
    v: ComplexScalar,
    opts: SumOptions,
) -> Result<ComplexScalar> {
    let spec = PhiSpec::new(vec![v, qa * ta, v * q12], vec![v * qa, v * q12 * t12], v, tb)?;
    Ok(basic_phi(&spec, opts)?.value)
}

/// The general two-point function
/// `1/((1-q_1)(1-q_2)(1-t_1t_2)) · (vq_1q_2t_1t_2)_∞/((vt_1t_2)_∞(vq_1q_2)_∞)
///   · [1 + (Φ_1 - 1)/(1-q_1t_1) + (Φ_2 - 1)/(1-q_2t_2)]`
/// with `Φ_1 = ₃Φ₂(v, q_1t_1, vq_1q_2; vq_1, vq_1q_2t_1t_2; v; t_2)` and `Φ_2`
/// its mirror image.
pub fn two_point_closed_general(
    p1: &ParamPair<ComplexScalar>,
    p2: &ParamPair<ComplexScalar>,
    v: ComplexScalar,
    opts: SumOptions,
) -> Result<NumericValue> {
    check_two_point_domain(p1, p2, v)?;
    let one = ComplexScalar::one();
    let (q1, t1, q2, t2) = (p1.q, p1.t, p2.q, p2.t);
    let (q12, t12) = (q1 * q2, t1 * t2);
    let den = nonvanishing(
        (one - q1) * (one - q2) * (one - t12) * poch(v * t12, v, opts)? * poch(v * q12, v, opts)?,
        "two-point prefactor",
    )?;
    let pre = poch(v * q12 * t12, v, opts)? / den;
    let phi1 = pair_phi(q1, t1, t2, q12, t12, v, opts)?;
    let phi2 = pair_phi(q2, t2, t1, q12, t12, v, opts)?;
    let a = (phi1 - one) / (one - q1 * t1);
    let b = (phi2 - one) / (one - q2 * t2);
    let value = pre * (one + a + b);
    let scale = pre.norm() * (1.0 + a.norm() + b.norm() + phi1.norm() + phi2.norm());
    Ok(NumericValue { value, error_bound: 10.0 * opts.tol * scale.max(1.0) })
}
