//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("lattice mismatch: {0}")]
    LatticeMismatch(String),

    #[error("non-finite value {value} at point {label}")]
    NonFinite { label: String, value: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("arity mismatch: {name} takes {expected} arguments, got {got}")]
    ArityMismatch {
        name: String,
        expected: usize,
        got: usize,
    },

    #[error("unknown function name: {0}")]
    UnknownFunction(String),

    #[error("nondifferentiable point: {0}")]
    NondifferentiablePoint(String),

    #[error("curvature hypothesis unmet: {0}")]
    CurvatureUnmet(String),

    #[error("negative input: {0}")]
    NegativeInput(String),

    #[error("empty sequence")]
    EmptySequence,

    #[error("invalid epsilon list: {0}")]
    InvalidEpsilons(String),

    #[error("grid too large: {0}")]
    GridTooLarge(String),

    #[error("expression too large: {0} combinations exceed the rewrite limit")]
    ExpressionTooLarge(usize),

    #[error("sequence is not relatively uniformly Cauchy for the given regulator")]
    NotCauchy,

    #[error("not a lattice homomorphism: {0}")]
    NotHomomorphism(String),

    #[error("not a positive map: {0}")]
    NotPositive(String),

    #[error("too many nondifferentiable sample points: {skipped} of {total} skipped")]
    TooManySkips { skipped: u64, total: u64 },

    #[error("cross-check failed: {0}")]
    CrossCheck(String),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
