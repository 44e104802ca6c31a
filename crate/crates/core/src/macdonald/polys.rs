use num::{One, Zero};

use super::{check_cap, m_to_p, qt_norm_power, Basis, SymFunc};
use crate::error::{QtError, Result};
use crate::partitions::{enumerate_partitions, Partition};
use crate::rational::{checked_recip, one_minus, pow_i, pow_u, Rational};

/// All `P_λ` of degree `d` by Gram–Schmidt on the monomial basis, taken in
/// increasing lexicographic order (a linear extension of dominance).
/// Results are in the monomial basis, in [`enumerate_partitions`] order.
pub fn macdonald_p_family(d: usize, q: &Rational, t: &Rational) -> Result<Vec<(Partition, SymFunc)>> {
    check_cap(d)?;
    let basis = enumerate_partitions(d);
    let weights: Vec<Rational> = basis.iter().map(|l| qt_norm_power(l, q, t)).collect::<Result<_>>()?;
    let m2p = m_to_p(d)?;
    let pair = |a: &[Rational], b: &[Rational]| -> Rational {
        a.iter().zip(b).zip(&weights).map(|((x, y), w)| x * y * w).sum()
    };

    // (power-sum coordinates, monomial coordinates, self-pairing)
    let mut done: Vec<(Vec<Rational>, Vec<Rational>, Rational)> = Vec::with_capacity(basis.len());
    let mut out = Vec::with_capacity(basis.len());
    for (idx, lambda) in basis.iter().enumerate().rev() {
        let mut pc = m2p.matrix.column(idx);
        let mut mc = vec![Rational::zero(); basis.len()];
        mc[idx] = Rational::one();
        let m_pc = pc.clone();
        for (prev_p, prev_m, norm) in &done {
            let c = pair(&m_pc, prev_p) / norm;
            if c.is_zero() {
                continue;
            }
            for (x, y) in pc.iter_mut().zip(prev_p) {
                *x -= &c * y;
            }
            for (x, y) in mc.iter_mut().zip(prev_m) {
                *x -= &c * y;
            }
        }
        let norm = pair(&pc, &pc);
        if norm.is_zero() {
            return Err(QtError::Degenerate(format!(
                "vanishing Gram–Schmidt pivot at {lambda}; redraw (q, t)"
            )));
        }
        out.push((lambda.clone(), SymFunc { degree: d, basis: Basis::Monomial, coeffs: mc.clone() }));
        done.push((pc, mc, norm));
    }
    out.reverse();
    Ok(out)
}

pub fn macdonald_p(lambda: &Partition, q: &Rational, t: &Rational) -> Result<SymFunc> {
    macdonald_p_family(lambda.size(), q, t)?
        .into_iter()
        .find(|(mu, _)| mu == lambda)
        .map(|(_, f)| Ok(f))
        .expect("the family covers every partition of the degree")
}

fn j_normaliser(lambda: &Partition, q: &Rational, t: &Rational) -> Rational {
    lambda
        .cell_stats()
        .iter()
        .map(|c| one_minus(&(pow_u(q, c.arm) * pow_u(t, c.leg + 1))))
        .product()
}

/// `J_λ = Π_{s ∈ λ} (1 - q^{arm(s)} t^{leg(s)+1}) P_λ`, in the power-sum basis.
pub fn macdonald_j(lambda: &Partition, q: &Rational, t: &Rational) -> Result<SymFunc> {
    let p = macdonald_p(lambda, q, t)?.to_basis(Basis::Power)?;
    Ok(p.scale(&j_normaliser(lambda, q, t)))
}

/// `p_k ↦ p_k / (1 - t^k)` on power-sum coordinates.
fn plethystic_divide(f: &SymFunc, t: &Rational) -> Result<SymFunc> {
    let coeffs = enumerate_partitions(f.degree)
        .iter()
        .zip(&f.coeffs)
        .map(|(mu, c)| {
            let den: Rational = mu.parts().iter().map(|&k| one_minus(&pow_u(t, k))).product();
            Ok(c * checked_recip(&den, "plethystic substitution at a root of unity")?)
        })
        .collect::<Result<_>>()?;
    Ok(SymFunc { coeffs, ..f.clone() })
}

fn h_tilde_from_p(lambda: &Partition, p: &SymFunc, q: &Rational, t: &Rational) -> Result<SymFunc> {
    let t_inv = checked_recip(t, "modified Macdonald basis at t = 0")?;
    let j = p.to_basis(Basis::Power)?.scale(&j_normaliser(lambda, q, &t_inv));
    let h = plethystic_divide(&j, &t_inv)?;
    Ok(h.scale(&pow_i(t, lambda.n_stat() as i64)?))
}

/// `H̃_λ(x; q, t) = t^{n(λ)} J_λ[X / (1 - t^{-1}); q, t^{-1}]`, power-sum basis.
pub fn modified_h_tilde(lambda: &Partition, q: &Rational, t: &Rational) -> Result<SymFunc> {
    let t_inv = checked_recip(t, "modified Macdonald basis at t = 0")?;
    let p = macdonald_p(lambda, q, &t_inv)?;
    h_tilde_from_p(lambda, &p, q, t)
}

/// Every `H̃_λ` of degree `d`, sharing one Gram–Schmidt pass.
pub fn modified_h_tilde_family(d: usize, q: &Rational, t: &Rational) -> Result<Vec<(Partition, SymFunc)>> {
    let t_inv = checked_recip(t, "modified Macdonald basis at t = 0")?;
    macdonald_p_family(d, q, &t_inv)?
        .into_iter()
        .map(|(lambda, p)| {
            let h = h_tilde_from_p(&lambda, &p, q, t)?;
            Ok((lambda, h))
        })
        .collect()
}
