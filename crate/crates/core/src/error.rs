use thiserror::Error;

/// Errors raised by the correlation engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QtError {
    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("series is not a unit (constant term {0})")]
    NonUnit(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("outside the convergence domain: {0}")]
    Divergence(String),

    #[error("series did not converge within {terms} terms")]
    NonConvergence { terms: usize },

    #[error("denominator factor vanishes at index m = {index}")]
    ZeroDenominator { index: usize },

    #[error("degenerate specialization: {0}")]
    Degenerate(String),

    #[error("constraint violated: {0}")]
    Constraint(String),

    #[error("degree {degree} exceeds the cap {cap}")]
    CapExceeded { degree: usize, cap: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, QtError>;
