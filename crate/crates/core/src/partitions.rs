//! Integer partitions and the cell statistics that drive every correlator.
//!
//! A [`Partition`] is stored as its weakly decreasing list of positive parts.
//! The two statistics of interest are the cell sum
//! `B_λ(q,t) = Σ_{cells} q^{coarm} t^{coleg}` ([`b_stat`]) and its companion
//! series `B̂_λ(q,t) = (1-q)^{-1} Σ_{i≥1} t^{i-1} q^{λ_i}` ([`b_hat_stat`]),
//! which is summed here in closed form with a geometric tail.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigUint, Num, One};
use serde::{Serialize, Serializer};

use crate::error::{QtError, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<usize>,
    size: usize,
}

/// Statistics of one cell `(row, col)` of a Young diagram (1-based).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CellStats {
    pub row: usize,
    pub col: usize,
    pub coarm: usize,
    pub coleg: usize,
    pub arm: usize,
    pub leg: usize,
}

impl Partition {
    /// Builds a partition, rejecting zero parts and increasing runs.
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.iter().any(|&p| p == 0) {
            return Err(QtError::Precondition("partition parts must be positive".into()));
        }
        if !parts.windows(2).all(|w| w[0] >= w[1]) {
            return Err(QtError::Precondition(
                "partition parts must be weakly decreasing".into(),
            ));
        }
        Ok(Self::from_sorted(parts))
    }

    /// Sorts arbitrary positive parts into a partition (zeros are dropped).
    pub fn from_unsorted(mut parts: Vec<usize>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Self::from_sorted(parts)
    }

    pub(crate) fn from_sorted(parts: Vec<usize>) -> Self {
        let size = parts.iter().sum();
        Partition { parts, size }
    }

    /// Builds `(r^{m_r})` from `(part, multiplicity)` pairs.
    pub fn from_multiplicities<I: IntoIterator<Item = (usize, usize)>>(mults: I) -> Self {
        let mut parts = Vec::new();
        for (r, m) in mults {
            parts.extend(std::iter::repeat(r).take(m));
        }
        Self::from_unsorted(parts)
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn length(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `λ_i` with the 1-based convention and `λ_i = 0` past the length.
    pub fn part(&self, i: usize) -> usize {
        if i == 0 {
            return 0;
        }
        self.parts.get(i - 1).copied().unwrap_or(0)
    }

    /// Multiplicities `m_r`, keyed by part size in increasing order.
    pub fn multiplicities(&self) -> BTreeMap<usize, usize> {
        let mut m = BTreeMap::new();
        for &p in &self.parts {
            *m.entry(p).or_insert(0) += 1;
        }
        m
    }

    /// Multiset union of the parts.
    pub fn union(&self, other: &Partition) -> Partition {
        let mut parts = self.parts.clone();
        parts.extend_from_slice(&other.parts);
        Self::from_unsorted(parts)
    }

    /// Whether `other`'s parts form a sub-multiset of `self`'s parts.
    pub fn contains_parts_of(&self, other: &Partition) -> bool {
        let mine = self.multiplicities();
        other
            .multiplicities()
            .iter()
            .all(|(r, m)| mine.get(r).is_some_and(|n| n >= m))
    }

    /// Multiset difference; `None` unless `other` is a sub-multiset.
    pub fn remove_parts(&self, other: &Partition) -> Option<Partition> {
        let mut mine = self.multiplicities();
        for (r, m) in other.multiplicities() {
            let n = mine.get_mut(&r)?;
            if *n < m {
                return None;
            }
            *n -= m;
        }
        Some(Self::from_multiplicities(mine))
    }

    /// Every sub-multiset of the parts, each exactly once.
    pub fn sub_multisets(&self) -> Vec<Partition> {
        let mults: Vec<(usize, usize)> = self.multiplicities().into_iter().collect();
        let mut out = vec![Vec::new()];
        for (r, m) in mults {
            let mut next = Vec::with_capacity(out.len() * (m + 1));
            for base in &out {
                for k in 0..=m {
                    let mut v: Vec<(usize, usize)> = Clone::clone(base);
                    if k > 0 {
                        v.push((r, k));
                    }
                    next.push(v);
                }
            }
            out = next;
        }
        out.into_iter().map(Self::from_multiplicities).collect()
    }

    /// The transposed diagram, `λ'_i = #{k : λ_k ≥ i}`.
    pub fn conjugate(&self) -> Partition {
        let first = self.part(1);
        let parts = (1..=first)
            .map(|i| self.parts.iter().take_while(|&&p| p >= i).count())
            .collect();
        Self::from_sorted(parts)
    }

    pub fn cell_stats(&self) -> Vec<CellStats> {
        let conj = self.conjugate();
        let mut out = Vec::with_capacity(self.size);
        for (i0, &row_len) in self.parts.iter().enumerate() {
            let row = i0 + 1;
            for col in 1..=row_len {
                out.push(CellStats {
                    row,
                    col,
                    coarm: col - 1,
                    coleg: row - 1,
                    arm: row_len - col,
                    leg: conj.part(col) - row,
                });
            }
        }
        out
    }

    /// `n(λ) = Σ (i-1) λ_i`.
    pub fn n_stat(&self) -> usize {
        self.parts.iter().enumerate().map(|(i, &p)| i * p).sum()
    }

    /// `z_λ = Π_r r^{m_r} m_r!`.
    pub fn z_factor(&self) -> BigUint {
        let mut z = BigUint::one();
        for (r, m) in self.multiplicities() {
            for k in 1..=m {
                z *= BigUint::from(r) * BigUint::from(k);
            }
        }
        z
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.parts.serialize(s)
    }
}

/// All partitions of `n` in reverse lexicographic order, `(n)` first.
pub fn enumerate_partitions(n: usize) -> Vec<Partition> {
    fn rec(remaining: usize, max_part: usize, prefix: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition::from_sorted(prefix.clone()));
            return;
        }
        for p in (1..=remaining.min(max_part)).rev() {
            prefix.push(p);
            rec(remaining - p, p, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Partitions of every size `0..=max`, grouped by size.
pub fn partitions_up_to(max: usize) -> Vec<Vec<Partition>> {
    (0..=max).map(enumerate_partitions).collect()
}

/// Dominance order `μ ⊴ λ` on partitions of the same size.
pub fn dominance_leq(mu: &Partition, lambda: &Partition) -> Result<bool> {
    if mu.size() != lambda.size() {
        return Err(QtError::SizeMismatch {
            left: mu.size(),
            right: lambda.size(),
        });
    }
    let len = mu.length().max(lambda.length());
    let (mut smu, mut slam) = (0usize, 0usize);
    for i in 1..=len {
        smu += mu.part(i);
        slam += lambda.part(i);
        if smu > slam {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `B_λ(q,t) = Σ_{cells} q^{coarm} t^{coleg}`, computed row by row.
pub fn b_stat<T: Num + Clone>(lambda: &Partition, q: &T, t: &T) -> T {
    let mut total = T::zero();
    let mut t_pow = T::one();
    for &row_len in lambda.parts() {
        let mut q_pow = T::one();
        let mut row = T::zero();
        for _ in 0..row_len {
            row = row + q_pow.clone();
            q_pow = q_pow * q.clone();
        }
        total = total + t_pow.clone() * row;
        t_pow = t_pow * t.clone();
    }
    total
}

/// `B̂_λ(q,t)` with the infinite tail `Σ_{i>ℓ} t^{i-1}` summed as
/// `t^ℓ/(1-t)`. Undefined (error) at `q = 1` or `t = 1`.
pub fn b_hat_stat<T: Num + Clone>(lambda: &Partition, q: &T, t: &T) -> Result<T> {
    let one_minus_q = T::one() - q.clone();
    let one_minus_t = T::one() - t.clone();
    if one_minus_q.is_zero() {
        return Err(QtError::DivisionByZero("B̂ statistic at q = 1".into()));
    }
    if one_minus_t.is_zero() {
        return Err(QtError::DivisionByZero("B̂ statistic at t = 1".into()));
    }
    let mut head = T::zero();
    let mut t_pow = T::one();
    for &p in lambda.parts() {
        head = head + t_pow.clone() * num::pow(q.clone(), p);
        t_pow = t_pow * t.clone();
    }
    Ok((head + t_pow / one_minus_t) / one_minus_q)
}
