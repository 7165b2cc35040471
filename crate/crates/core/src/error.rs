//! Crate-wide error type.
//!
//! Numeric verdicts that merely fail to decide an inequality are *not* errors
//! (see [`crate::reports::Verdict::Inconclusive`]); errors are reserved for
//! inputs an operation cannot meaningfully process or for evaluations whose
//! convergence diagnostics failed outright.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("body has non-finite or otherwise unusable coordinates: {0}")]
    UnboundedBody(String),

    #[error("empty vertex/generator list")]
    EmptyBody,

    #[error("body does not contain the origin (residual {residual:.3e})")]
    OriginNotContained { residual: f64 },

    #[error("body does not contain the origin, required by {context}")]
    MissingOrigin { context: &'static str },

    #[error("bodies violate the symmetry class required by {context}")]
    ClassViolation { context: &'static str },

    #[error("unsupported representation: {0}")]
    UnsupportedRepresentation(String),

    #[error("unsupported case: {0}")]
    UnsupportedCase(String),

    #[error("difference quotients failed to contract (last deltas {last:.3e} vs {prev:.3e}); limit existence not established")]
    Inconclusive { prev: f64, last: f64 },

    #[error("non-positive base measure ({0:.3e}); concavity transforms need mu > 0")]
    NonPositiveMeasure(f64),

    #[error("non-positive first-order mixed measure ({0:.3e}); ratio bounds need mu(A;B), mu(A;C) > 0")]
    NonPositiveMixed(f64),

    #[error("F'(mu(K)) = 0: {case}")]
    DegenerateDerivative { case: String },

    #[error("zero-measure base body in a ratio or normalization")]
    ZeroMeasureBase,

    #[error("breakpoint grid is not strictly increasing or function is not convex on it (worst slope drop {0:.3e})")]
    NotConvex(f64),

    #[error("function must be nonnegative for this form (min value {0:.3e})")]
    Negative(f64),

    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    #[error("search budget of {budget} exhausted after {tried} instances without a violation (not a proof of validity)")]
    BudgetExhausted { budget: usize, tried: usize },

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
