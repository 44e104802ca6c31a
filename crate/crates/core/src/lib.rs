//! Verified computation of q,t-deformed n-point correlation functions.
//!
//! Each quantity is evaluated twice: once from a closed formula (Pochhammer
//! products, basic hypergeometric series, exponentials of mode sums) and once
//! by brute force (partition sums, explicit Fock-space operator traces).
//! Exact agreement is certified in truncated power series over the
//! rationals; the hypergeometric formulas are checked numerically.
//!
//! Module map:
//! - [`partitions`]: partitions and the statistics `B_λ`, `B̂_λ`.
//! - [`qseries`]: truncated series in `v` and Pochhammer products.
//! - [`hypergeom`]: numeric Pochhammer symbols and `_{r+1}Φ_r`.
//! - [`correlators`]: 1- and 2-point functions, brute and closed.
//! - [`fock`]: Heisenberg Fock space, vertex operators and their traces.
//! - [`macdonald`]: Macdonald bases and the spectral operator `B̂_{q,t}`.
//! - [`verify`]: seeded verification suites used by the CLI.

pub mod correlators;
pub mod error;
pub mod fock;
pub mod hypergeom;
pub mod linalg;
pub mod macdonald;
pub mod partitions;
pub mod qseries;
pub mod rational;
pub mod verify;

pub use error::{QtError, Result};
pub use partitions::Partition;
pub use qseries::VSeries;
pub use rational::Rational;
