//! The n-point functions `F̂(q_1,t_1; …; q_n,t_n) = Σ_λ Π_k B̂_λ(q_k,t_k) v^{|λ|}`.
//!
//! Two backends live side by side:
//! - [`exact`]: truncated series in `v` at rational parameters. Brute-force
//!   partition sums and every closed formula built only from Pochhammer
//!   products (one-point function, two-point function on `q_1q_2t_1t_2 = 1`,
//!   the single- and two-row expectations).
//! - [`numeric`]: complex double precision, required for the general two-point
//!   function whose `₃Φ₂` factors do not truncate in `v`.
//!
//! [`tterms`] holds the split of the two-point expectation into the
//! `i < j`, `i > j` and `i = j` row-pair sums.

pub mod exact;
pub mod numeric;
pub mod tterms;

use std::collections::BTreeMap;

use serde::Serialize;

pub use exact::{
    bloch_okounkov_form, euler_product, expectation_v, one_point_closed, single_row_expectation_closed,
    symmetry_report, trace_brute_b, trace_brute_hat, two_point_closed_special,
    two_row_expectation_closed, SymmetryReport, TwoRowForms,
};
pub use numeric::{
    brute_tail_bound, trace_brute_hat_numeric, two_point_closed_general, NumericValue,
    DEFAULT_BRUTE_SIZE,
};
pub use tterms::{t_terms_exact, t_terms_numeric, ExactTTerms, NumericTTerms};

use crate::qseries::VSeries;

/// One `(q, t)` pair of an n-point function.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParamPair<T> {
    pub q: T,
    pub t: T,
}

impl<T: Clone> ParamPair<T> {
    pub fn new(q: T, t: T) -> Self {
        ParamPair { q, t }
    }

    /// The pair with `q` and `t` exchanged.
    pub fn swapped(&self) -> Self {
        ParamPair { q: self.t.clone(), t: self.q.clone() }
    }
}

/// A correlator value from either backend plus bookkeeping for reports.
#[derive(Clone, Debug, Serialize)]
pub struct CorrelatorResult {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<VSeries>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub numeric: Option<NumericValue>,
    pub metadata: BTreeMap<String, String>,
}

impl CorrelatorResult {
    pub fn exact(series: VSeries) -> Self {
        let mut metadata = BTreeMap::new();
        metadata.insert("order".to_string(), series.order().to_string());
        CorrelatorResult { exact: Some(series), numeric: None, metadata }
    }

    pub fn numeric(value: NumericValue) -> Self {
        CorrelatorResult { exact: None, numeric: Some(value), metadata: BTreeMap::new() }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.metadata.insert(key.to_string(), value.to_string());
        self
    }
}
