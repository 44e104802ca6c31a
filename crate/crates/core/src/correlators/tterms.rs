//! Row-pair decomposition of the two-point expectation.
//!
//! Writing `B̂_λ(q,t) = (1-q)^{-1} Σ_{i≥1} t^{i-1} q^{λ_i}` (with `λ_i = 0`
//! past the length), the product of two statistics splits into row pairs
//! `i < j`, `i > j` and `i = j`:
//! `⟨B̂_λ(q_1,t_1) B̂_λ(q_2,t_2)⟩_v = (T_1 + T_2 + T_3) / ((1-q_1)(1-q_2))`.

use num::{One, Zero};
use serde::Serialize;

use super::exact::{euler_product, partition_series};
use super::numeric::{check_two_point_domain, nonvanishing, pair_phi, poch};
use super::ParamPair;
use crate::error::{QtError, Result};
use crate::hypergeom::{basic_phi, ser_complex, ComplexScalar, PhiSpec, SumOptions};
use crate::partitions::Partition;
use crate::qseries::{pochhammer_inf_shifted, VSeries};
use crate::rational::{checked_recip, one_minus, pow_u, Rational};

#[derive(Clone, Debug, Serialize)]
pub struct ExactTTerms {
    pub t1: VSeries,
    pub t2: VSeries,
    /// `i = j` part by partition summation.
    pub t3: VSeries,
    /// `i = j` part from the q-binomial theorem.
    pub t3_closed: VSeries,
}

/// `Σ_{1≤i<j} t_a^{i-1} t_b^{j-1} q_a^{λ_i} q_b^{λ_j}`, with the rows past
/// `ℓ(λ)` summed as geometric series.
fn ordered_rows(
    lambda: &Partition,
    qa: &Rational,
    ta: &Rational,
    qb: &Rational,
    tb: &Rational,
) -> Result<Rational> {
    let l = lambda.length();
    let inv_b = checked_recip(&one_minus(tb), "1 - t vanishes")?;
    let inv_ab = checked_recip(&one_minus(&(ta * tb)), "1 - t1 t2 vanishes")?;
    let xa: Vec<Rational> =
        (1..=l).map(|i| pow_u(ta, i - 1) * pow_u(qa, lambda.part(i))).collect();
    let mut finite = Rational::zero();
    let mut prefix = Rational::zero(); // Σ_{i<j} x_a(i)
    for j in 1..=l {
        finite += &prefix * pow_u(tb, j - 1) * pow_u(qb, lambda.part(j));
        prefix += &xa[j - 1];
    }
    // i ≤ ℓ < j, then ℓ < i < j
    let tail_j = &prefix * pow_u(tb, l) * &inv_b;
    let tail_ij = pow_u(ta, l) * pow_u(tb, l + 1) * &inv_b * &inv_ab;
    Ok(finite + tail_j + tail_ij)
}

fn diagonal_rows(lambda: &Partition, q12: &Rational, t12: &Rational) -> Result<Rational> {
    let inv = checked_recip(&one_minus(t12), "1 - t1 t2 vanishes")?;
    let l = lambda.length();
    let head = (1..=l).fold(Rational::zero(), |acc, i| {
        acc + pow_u(t12, i - 1) * pow_u(q12, lambda.part(i))
    });
    Ok(head + pow_u(t12, l) * inv)
}

/// `T_1, T_2, T_3` as exact series: brute-force partition sums, plus the
/// closed Pochhammer form of `T_3`.
pub fn t_terms_exact(
    p1: &ParamPair<Rational>,
    p2: &ParamPair<Rational>,
    order: usize,
) -> Result<ExactTTerms> {
    let (q1, t1, q2, t2) = (&p1.q, &p1.t, &p2.q, &p2.t);
    let q12 = q1 * q2;
    let t12 = t1 * t2;
    let euler = euler_product(order);
    let t1s = &euler * &partition_series(order, |l| ordered_rows(l, q1, t1, q2, t2))?;
    let t2s = &euler * &partition_series(order, |l| ordered_rows(l, q2, t2, q1, t1))?;
    let t3s = &euler * &partition_series(order, |l| diagonal_rows(l, &q12, &t12))?;

    let c = checked_recip(&one_minus(&t12), "1 - t1 t2 vanishes")?;
    let num = &euler * &pochhammer_inf_shifted(&(&q12 * &t12), 1, order);
    let den = &pochhammer_inf_shifted(&t12, 1, order) * &pochhammer_inf_shifted(&q12, 1, order);
    let t3_closed = num.div(&den)?.scale(&c);
    Ok(ExactTTerms { t1: t1s, t2: t2s, t3: t3s, t3_closed })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct NumericTTerms {
    /// `i < j` part as the double sum over row indices.
    #[serde(serialize_with = "ser_complex")]
    pub t1_double_sum: ComplexScalar,
    /// `i < j` part through a single `₃Φ₂` in the argument `v² q_1 q_2`.
    #[serde(serialize_with = "ser_complex")]
    pub t1_hyper: ComplexScalar,
    /// `i < j` part in its final closed shape (argument `t_2`).
    #[serde(serialize_with = "ser_complex")]
    pub t1_closed: ComplexScalar,
    #[serde(serialize_with = "ser_complex")]
    pub t2_double_sum: ComplexScalar,
    #[serde(serialize_with = "ser_complex")]
    pub t2_closed: ComplexScalar,
    #[serde(serialize_with = "ser_complex")]
    pub t3_sum: ComplexScalar,
    #[serde(serialize_with = "ser_complex")]
    pub t3_closed: ComplexScalar,
}

/// `(v)_∞/(vq_1q_2)_∞ Σ_{i≥0} t_a^i (vq_a)_i/(v)_i Σ_{j>i} t_b^j (vq_1q_2)_j/(vq_a)_j`.
fn ordered_double_sum(
    qa: ComplexScalar,
    ta: ComplexScalar,
    tb: ComplexScalar,
    q12: ComplexScalar,
    v: ComplexScalar,
    opts: SumOptions,
) -> Result<ComplexScalar> {
    let r = ta.norm().max(tb.norm());
    let terms = if r == 0.0 {
        2
    } else {
        ((opts.tol * 1e-3).ln() / r.ln()).ceil() as usize + 16
    };
    if terms > opts.max_terms.max(1000) * 20 {
        return Err(QtError::NonConvergence { terms });
    }
    let one = ComplexScalar::one();
    // c_j = t_b^j (vq_1q_2)_j / (vq_a)_j
    let mut c = Vec::with_capacity(terms + 1);
    let mut cur = one;
    let mut vp = v; // v^{j+1}
    for _ in 0..=terms {
        c.push(cur);
        cur *= tb * (one - q12 * vp) / nonvanishing(one - qa * vp, "1 - q v^k")?;
        vp *= v;
    }
    let mut suffix = vec![ComplexScalar::zero(); terms + 2];
    for j in (0..=terms).rev() {
        suffix[j] = suffix[j + 1] + c[j];
    }
    let mut total = ComplexScalar::zero();
    let mut a = one; // t_a^i (vq_a)_i / (v)_i
    let mut vp = v;
    for i in 0..terms {
        total += a * suffix[i + 1];
        a *= ta * (one - qa * vp) / nonvanishing(one - vp, "1 - v^k")?;
        vp *= v;
    }
    let pre = poch(v, v, opts)? / nonvanishing(poch(v * q12, v, opts)?, "(vq1q2)_∞")?;
    Ok(pre * total)
}

/// `(v)_∞(vq_1q_2t_1t_2)_∞ / ((1-t_1t_2)(vt_1t_2)_∞(vq_1q_2)_∞)`.
fn diagonal_closed(
    q12: ComplexScalar,
    t12: ComplexScalar,
    v: ComplexScalar,
    opts: SumOptions,
) -> Result<ComplexScalar> {
    let one = ComplexScalar::one();
    let den = nonvanishing(
        (one - t12) * poch(v * t12, v, opts)? * poch(v * q12, v, opts)?,
        "diagonal prefactor",
    )?;
    Ok(poch(v, v, opts)? * poch(v * q12 * t12, v, opts)? / den)
}

/// Numeric `T_1, T_2, T_3`, each by more than one route.
pub fn t_terms_numeric(
    p1: &ParamPair<ComplexScalar>,
    p2: &ParamPair<ComplexScalar>,
    v: ComplexScalar,
    opts: SumOptions,
) -> Result<NumericTTerms> {
    check_two_point_domain(p1, p2, v)?;
    let one = ComplexScalar::one();
    let (q1, t1, q2, t2) = (p1.q, p1.t, p2.q, p2.t);
    let (q12, t12) = (q1 * q2, t1 * t2);

    let t1_double_sum = ordered_double_sum(q1, t1, t2, q12, v, opts)?;
    let t2_double_sum = ordered_double_sum(q2, t2, t1, q12, v, opts)?;

    // i < j part resummed over j - i first
    let q2i = one / nonvanishing(q2, "q2")?;
    let hyper = basic_phi(
        &PhiSpec::new(vec![t12, t2, q2i], vec![v * t2, v * q1 * t12], v, v * v * q12)?,
        opts,
    )?
    .value;
    let hyper_pre = t2 / (one - t2) * poch(v, v, opts)? * poch(v * q1 * t12, v, opts)?
        / nonvanishing(poch(v * q1, v, opts)? * poch(t12, v, opts)?, "T1 prefactor")?;
    let t1_hyper = hyper_pre * hyper;

    let diag = diagonal_closed(q12, t12, v, opts)?;
    let phi1 = pair_phi(q1, t1, t2, q12, t12, v, opts)?;
    let phi2 = pair_phi(q2, t2, t1, q12, t12, v, opts)?;
    let t1_closed = diag * (phi1 - one) / (one - q1 * t1);
    let t2_closed = diag * (phi2 - one) / (one - q2 * t2);

    let sum = basic_phi(&PhiSpec::new(vec![v * q12], vec![], v, t12)?, opts)?.value;
    let t3_sum = poch(v, v, opts)? / nonvanishing(poch(v * q12, v, opts)?, "(vq1q2)_∞")? * sum;

    Ok(NumericTTerms {
        t1_double_sum,
        t1_hyper,
        t1_closed,
        t2_double_sum,
        t2_closed,
        t3_sum,
        t3_closed: diag,
    })
}
