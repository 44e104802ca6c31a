//! Exact backend: everything is a truncated series in `v` over the rationals.

use num::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::ParamPair;
use crate::error::{QtError, Result};
use crate::partitions::{b_hat_stat, b_stat, enumerate_partitions, Partition};
use crate::qseries::{pochhammer_fin_shifted, pochhammer_inf, pochhammer_inf_shifted, VSeries};
use crate::rational::{checked_recip, one_minus, ser_rational, Rational};

/// `(v)_∞` modulo `v^{order+1}`.
pub fn euler_product(order: usize) -> VSeries {
    pochhammer_inf_shifted(&Rational::one(), 1, order)
}

/// `Σ_{|λ|≤order} f(λ) v^{|λ|}`; degrees are summed in parallel.
pub(crate) fn partition_series<F>(order: usize, f: F) -> Result<VSeries>
where
    F: Fn(&Partition) -> Result<Rational> + Sync,
{
    let coeffs = (0..=order)
        .into_par_iter()
        .map(|d| {
            enumerate_partitions(d)
                .iter()
                .try_fold(Rational::zero(), |acc, lambda| Ok(acc + f(lambda)?))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VSeries::from_coeffs(coeffs))
}

/// `⟨f⟩_v = (v)_∞ Σ_λ f(λ) v^{|λ|}`, exact modulo `v^{order+1}`.
pub fn expectation_v<F>(f: F, order: usize) -> Result<VSeries>
where
    F: Fn(&Partition) -> Result<Rational> + Sync,
{
    Ok(&euler_product(order) * &partition_series(order, f)?)
}

fn require_not_one(pairs: &[ParamPair<Rational>]) -> Result<()> {
    for (k, p) in pairs.iter().enumerate() {
        if p.q.is_one() || p.t.is_one() {
            return Err(QtError::DivisionByZero(format!(
                "pair {} has q = 1 or t = 1, where B̂ is undefined",
                k + 1
            )));
        }
    }
    Ok(())
}

/// `F̂(q_1,t_1;…;q_n,t_n) = Σ_λ Π_k B̂_λ(q_k,t_k) v^{|λ|}` by direct summation.
pub fn trace_brute_hat(pairs: &[ParamPair<Rational>], order: usize) -> Result<VSeries> {
    require_not_one(pairs)?;
    partition_series(order, |lambda| {
        pairs
            .iter()
            .try_fold(Rational::one(), |acc, p| Ok(acc * b_hat_stat(lambda, &p.q, &p.t)?))
    })
}

/// `F(q_1,t_1;…) = Σ_λ Π_k B_λ(q_k,t_k) v^{|λ|}`.
pub fn trace_brute_b(pairs: &[ParamPair<Rational>], order: usize) -> Result<VSeries> {
    partition_series(order, |lambda| {
        Ok(pairs
            .iter()
            .fold(Rational::one(), |acc, p| acc * b_stat(lambda, &p.q, &p.t)))
    })
}

/// `⟨q^{λ_i}⟩_v = (v^i)_∞ / (v^i q)_∞`.
pub fn single_row_expectation_closed(q: &Rational, i: usize, order: usize) -> Result<VSeries> {
    if i == 0 {
        return Err(QtError::Precondition("row index starts at 1".into()));
    }
    pochhammer_inf_shifted(&Rational::one(), i, order).div(&pochhammer_inf_shifted(q, i, order))
}

/// Both closed forms of `⟨q_1^{λ_i} q_2^{λ_j}⟩_v` for `i < j`.
#[derive(Clone, Debug, Serialize)]
pub struct TwoRowForms {
    /// `(v)_∞ / ((v)_{i-1} (v^i q_1)_{j-i} (v^j q_1 q_2)_∞)`
    pub product_form: VSeries,
    /// `(v)_∞/(vq_1q_2)_∞ · (vq_1)_{i-1}(vq_1q_2)_{j-1} / ((v)_{i-1}(vq_1)_{j-1})`
    pub ratio_form: VSeries,
}

impl TwoRowForms {
    pub fn agree(&self) -> bool {
        self.product_form == self.ratio_form
    }
}

pub fn two_row_expectation_closed(
    q1: &Rational,
    q2: &Rational,
    i: usize,
    j: usize,
    order: usize,
) -> Result<TwoRowForms> {
    if i == 0 || i >= j {
        return Err(QtError::Precondition(format!("need 1 ≤ i < j, got i = {i}, j = {j}")));
    }
    let one = Rational::one();
    let q12 = q1 * q2;
    let euler = euler_product(order);

    let den = &(&pochhammer_fin_shifted(&one, 1, i - 1, order)
        * &pochhammer_fin_shifted(q1, i, j - i, order))
        * &pochhammer_inf_shifted(&q12, j, order);
    let product_form = euler.div(&den)?;

    let num = &(&euler * &pochhammer_fin_shifted(q1, 1, i - 1, order))
        * &pochhammer_fin_shifted(&q12, 1, j - 1, order);
    let den = &(&pochhammer_inf_shifted(&q12, 1, order)
        * &pochhammer_fin_shifted(&one, 1, i - 1, order))
        * &pochhammer_fin_shifted(q1, 1, j - 1, order);
    let ratio_form = num.div(&den)?;

    Ok(TwoRowForms { product_form, ratio_form })
}

/// `F̂(q,t) = (vqt)_∞ / ((q)_∞ (t)_∞)`.
pub fn one_point_closed(q: &Rational, t: &Rational, order: usize) -> Result<VSeries> {
    require_not_one(&[ParamPair::new(q.clone(), t.clone())])?;
    let num = pochhammer_inf_shifted(&(q * t), 1, order);
    let den = &pochhammer_inf(q, order) * &pochhammer_inf(t, order);
    num.div(&den)
}

/// The one-point function at `t = q^{-1}`: `(v)_∞ / ((q)_∞ (q^{-1})_∞)`.
pub fn bloch_okounkov_form(q: &Rational, order: usize) -> Result<VSeries> {
    let qi = checked_recip(q, "q = 0 has no inverse")?;
    if q.is_one() {
        return Err(QtError::DivisionByZero("q = 1".into()));
    }
    let den = &pochhammer_inf(q, order) * &pochhammer_inf(&qi, order);
    euler_product(order).div(&den)
}

/// Two-point function on the surface `q_1 q_2 t_1 t_2 = 1`, where both
/// hypergeometric factors sum to Pochhammer ratios.
pub fn two_point_closed_special(
    p1: &ParamPair<Rational>,
    p2: &ParamPair<Rational>,
    order: usize,
) -> Result<VSeries> {
    let (q1, t1, q2, t2) = (&p1.q, &p1.t, &p2.q, &p2.t);
    let prod = q1 * q2 * t1 * t2;
    if !prod.is_one() {
        return Err(QtError::Constraint(format!("q1·q2·t1·t2 = {prod}, expected 1")));
    }
    let t12 = t1 * t2;
    let q12 = q1 * q2;
    let scalar = checked_recip(
        &(one_minus(q1) * one_minus(q2) * one_minus(&t12)),
        "(1-q1)(1-q2)(1-t1t2) vanishes",
    )?;
    // The constraint makes every parameter nonzero, so the inverses exist.
    let (t1i, t2i, q1i, q2i) = (t1.recip(), t2.recip(), q1.recip(), q2.recip());

    let pre = euler_product(order).div(
        &(&pochhammer_inf_shifted(&t12, 1, order) * &pochhammer_inf_shifted(&q12, 1, order)),
    )?;
    let term = |qa: &Rational, ta: &Rational, tai: &Rational, qbi: &Rational, tb: &Rational| {
        let c = checked_recip(&one_minus(&(qa * ta)), "1 - q_i t_i vanishes")?;
        let num = &pochhammer_inf_shifted(tai, 1, order) * &pochhammer_inf(qbi, order);
        let den = &pochhammer_inf_shifted(qa, 1, order) * &pochhammer_inf(tb, order);
        Ok::<_, QtError>(num.div(&den)?.scale(&c))
    };
    let a = term(q1, t1, &t1i, &q2i, t2)?;
    let b = term(q2, t2, &t2i, &q1i, t1)?;
    Ok((&pre * &(&a + &b)).scale(&scalar))
}

/// Outcome of comparing `trace_brute_hat` under signed permutations of its
/// pairs: permuting pairs, and exchanging `q_k ↔ t_k` inside chosen pairs.
#[derive(Clone, Debug, Serialize)]
pub struct SymmetryReport {
    pub n: usize,
    /// Number of signed permutations tried (`2^n n!`).
    pub transforms: usize,
    /// Largest coefficient deviation over all signed permutations.
    #[serde(serialize_with = "ser_rational")]
    pub max_deviation: Rational,
    /// Transforms that swap either every pair or none (`2 n!` of them).
    pub uniform_transforms: usize,
    /// Largest deviation over the uniform-swap transforms only.
    #[serde(serialize_with = "ser_rational")]
    pub uniform_max_deviation: Rational,
    /// Transforms with nonzero deviation, as `(permutation, swapped slots)`.
    pub violations: Vec<(Vec<usize>, Vec<usize>)>,
}

impl SymmetryReport {
    pub fn fully_invariant(&self) -> bool {
        self.max_deviation.is_zero()
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Compares `trace_brute_hat` against every signed permutation of the pairs.
///
/// Conjugating partitions exchanges `q ↔ t` in all pairs at once, so the
/// uniform swaps are always symmetries; swapping a single pair is not one
/// for `n ≥ 2` (already at `v^2` the difference is `(q_1-t_1)(q_2-t_2)`),
/// and such transforms are listed in `violations`.
pub fn symmetry_report(pairs: &[ParamPair<Rational>], order: usize) -> Result<SymmetryReport> {
    let n = pairs.len();
    if n > 3 {
        return Err(QtError::Precondition(format!("symmetry check supports n ≤ 3, got {n}")));
    }
    let base = trace_brute_hat(pairs, order)?;
    let full_mask = (1u32 << n) - 1;
    let mut report = SymmetryReport {
        n,
        transforms: 0,
        max_deviation: Rational::zero(),
        uniform_transforms: 0,
        uniform_max_deviation: Rational::zero(),
        violations: Vec::new(),
    };
    for perm in permutations(n) {
        for mask in 0..=full_mask {
            let moved: Vec<_> = perm
                .iter()
                .enumerate()
                .map(|(k, &src)| {
                    if mask >> k & 1 == 1 {
                        pairs[src].swapped()
                    } else {
                        pairs[src].clone()
                    }
                })
                .collect();
            let dev = trace_brute_hat(&moved, order)?.max_abs_diff(&base);
            report.transforms += 1;
            if mask == 0 || mask == full_mask {
                report.uniform_transforms += 1;
                if dev > report.uniform_max_deviation {
                    report.uniform_max_deviation = dev.clone();
                }
            }
            if !dev.is_zero() {
                let swapped = (0..n).filter(|k| mask >> k & 1 == 1).collect();
                report.violations.push((perm.clone(), swapped));
            }
            if dev > report.max_deviation {
                report.max_deviation = dev;
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, pow_u, rat};

    const N: usize = 12;

    fn pair(q: Rational, t: Rational) -> ParamPair<Rational> {
        ParamPair::new(q, t)
    }

    #[test]
    fn constant_expectation_is_one() {
        let s = expectation_v(|_| Ok(Rational::one()), N).unwrap();
        assert_eq!(s, VSeries::one(N));
    }

    #[test]
    fn size_expectation_is_convolution() {
        // (v)_∞ Σ d p(d) v^d, with p(d) counted independently.
        let weights: Vec<Rational> =
            (0..=N).map(|d| int((d * enumerate_partitions(d).len()) as i64)).collect();
        let expect = &euler_product(N) * &VSeries::from_coeffs(weights);
        let s = expectation_v(|l| Ok(int(l.size() as i64)), N).unwrap();
        assert_eq!(s, expect);
    }

    #[test]
    fn empty_trace_is_inverse_euler() {
        let s = trace_brute_hat(&[], N).unwrap();
        assert_eq!(s, euler_product(N).inverse().unwrap());
    }

    #[test]
    fn one_pair_leading_term() {
        let s = trace_brute_hat(&[pair(rat(1, 2), rat(1, 3))], N).unwrap();
        assert_eq!(*s.coeff(0), int(3));
        let b = trace_brute_b(&[pair(rat(1, 2), rat(1, 3))], N).unwrap();
        assert!(b.coeff(0).is_zero());
    }

    #[test]
    fn b_and_b_hat_traces_related() {
        let (q, t) = (rat(2, 3), rat(-1, 4));
        let b_hat_empty = (one_minus(&q) * one_minus(&t)).recip();
        let hat = trace_brute_hat(&[pair(q.clone(), t.clone())], N).unwrap();
        let b = trace_brute_b(&[pair(q, t)], N).unwrap();
        let expect = &euler_product(N).inverse().unwrap().scale(&b_hat_empty) - &hat;
        assert_eq!(b, expect);
    }

    #[test]
    fn b_trace_two_pairs_by_inclusion_exclusion() {
        let p1 = pair(rat(1, 2), rat(3, 5));
        let p2 = pair(rat(-2, 3), rat(1, 7));
        let e1 = (one_minus(&p1.q) * one_minus(&p1.t)).recip();
        let e2 = (one_minus(&p2.q) * one_minus(&p2.t)).recip();
        let inv = euler_product(N).inverse().unwrap();
        let expect = &(&(&inv.scale(&(&e1 * &e2))
            - &trace_brute_hat(&[p2.clone()], N).unwrap().scale(&e1))
            - &trace_brute_hat(&[p1.clone()], N).unwrap().scale(&e2))
            + &trace_brute_hat(&[p1.clone(), p2.clone()], N).unwrap();
        assert_eq!(trace_brute_b(&[p1, p2], N).unwrap(), expect);
    }

    #[test]
    fn unit_parameters_rejected() {
        assert!(trace_brute_hat(&[pair(int(1), rat(1, 2))], 3).is_err());
        assert!(one_point_closed(&rat(1, 2), &int(1), 3).is_err());
    }

    #[test]
    fn single_row_matches_brute() {
        for i in 1..=3 {
            for q in [rat(1, 2), rat(-3, 4), int(2)] {
                let closed = single_row_expectation_closed(&q, i, N).unwrap();
                let brute = expectation_v(|l| Ok(pow_u(&q, l.part(i))), N).unwrap();
                assert_eq!(closed, brute, "i = {i}, q = {q}");
            }
        }
    }

    #[test]
    fn single_row_degenerate_parameters() {
        let zero = single_row_expectation_closed(&Rational::zero(), 2, N).unwrap();
        let indicator =
            expectation_v(|l| Ok(if l.part(2) == 0 { int(1) } else { int(0) }), N).unwrap();
        assert_eq!(zero, indicator);
        assert_eq!(single_row_expectation_closed(&int(1), 2, N).unwrap(), VSeries::one(N));
        assert!(single_row_expectation_closed(&int(1), 0, N).is_err());
    }

    #[test]
    fn two_row_forms() {
        let forms = two_row_expectation_closed(&rat(1, 2), &rat(1, 3), 1, 2, N).unwrap();
        assert!(forms.agree());
        let brute = expectation_v(
            |l| Ok(pow_u(&rat(1, 2), l.part(1)) * pow_u(&rat(1, 3), l.part(2))),
            N,
        )
        .unwrap();
        assert_eq!(forms.product_form, brute);

        let trivial = two_row_expectation_closed(&int(1), &int(1), 2, 4, N).unwrap();
        assert_eq!(trivial.product_form, VSeries::one(N));
        assert!(trivial.agree());

        // q_2 = 1 collapses to the single-row expectation of row i.
        let reduced = two_row_expectation_closed(&rat(2, 5), &int(1), 2, 3, N).unwrap();
        assert_eq!(reduced.ratio_form, single_row_expectation_closed(&rat(2, 5), 2, N).unwrap());

        assert!(two_row_expectation_closed(&int(1), &int(1), 2, 2, N).is_err());
    }

    #[test]
    fn one_point_leading_and_brute() {
        let (q, t) = (rat(1, 2), rat(1, 3));
        let closed = one_point_closed(&q, &t, N).unwrap();
        assert_eq!(*closed.coeff(0), int(3));
        assert_eq!(closed, trace_brute_hat(&[pair(q, t)], N).unwrap());
    }

    #[test]
    fn one_point_at_inverse_parameters() {
        let q = rat(1, 2);
        let closed = one_point_closed(&q, &q.recip(), N).unwrap();
        assert_eq!(closed, bloch_okounkov_form(&q, N).unwrap());
    }

    #[test]
    fn special_two_point_examples() {
        for (q1, t1, q2, t2) in [
            (rat(1, 2), rat(1, 4), int(4), int(2)),
            (rat(1, 3), rat(1, 2), int(2), int(3)),
        ] {
            let (p1, p2) = (pair(q1, t1), pair(q2, t2));
            let closed = two_point_closed_special(&p1, &p2, 10).unwrap();
            let brute = trace_brute_hat(&[p1.clone(), p2.clone()], 10).unwrap();
            assert_eq!(closed, brute);
            let e1 = (one_minus(&p1.q) * one_minus(&p1.t)).recip();
            let e2 = (one_minus(&p2.q) * one_minus(&p2.t)).recip();
            assert_eq!(*closed.coeff(0), e1 * e2);
        }
    }

    #[test]
    fn special_two_point_constraint() {
        let err = two_point_closed_special(
            &pair(rat(1, 2), rat(1, 3)),
            &pair(int(4), int(2)),
            4,
        )
        .unwrap_err();
        assert!(matches!(err, QtError::Constraint(_)));
    }

    #[test]
    fn single_pair_swap_symmetry() {
        let r1 = symmetry_report(&[pair(rat(1, 2), rat(-1, 3))], 8).unwrap();
        assert_eq!((r1.transforms, r1.fully_invariant()), (2, true));
    }

    #[test]
    fn individual_pair_swaps_break_invariance() {
        let pairs = [pair(rat(1, 2), rat(-1, 3)), pair(rat(2, 5), int(3))];
        let r2 = symmetry_report(&pairs, 8).unwrap();
        assert_eq!((r2.transforms, r2.uniform_transforms), (8, 4));
        assert!(r2.uniform_max_deviation.is_zero());
        assert_eq!(r2.violations.len(), 4);
        // the v^2 coefficients differ by exactly (q_1 - t_1)(q_2 - t_2)
        let swapped = [pairs[0].swapped(), pairs[1].clone()];
        let a = trace_brute_hat(&pairs, 2).unwrap();
        let b = trace_brute_hat(&swapped, 2).unwrap();
        let expect = (&pairs[0].q - &pairs[0].t) * (&pairs[1].q - &pairs[1].t);
        assert_eq!(a.coeff(2) - b.coeff(2), expect);
    }

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(3).len(), 6);
        assert_eq!(permutations(0).len(), 1);
    }
}
