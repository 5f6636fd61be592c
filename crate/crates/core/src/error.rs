use thiserror::Error;

use crate::localizer::StarClass;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zero vector does not define an observable")]
    ZeroVector,

    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),

    #[error("overlap mismatch: expected {expected}, found {found}")]
    OverlapMismatch { expected: f64, found: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("unknown observable `{0}`")]
    UnknownObservable(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("{value} is outside the open interval (1/3, 1)")]
    DomainError { value: f64 },

    /// Overlap 0 or 1: the target sits in the star of the prepared state and
    /// is value definite, so there is nothing to certify.
    #[error("overlap {overlap} is degenerate; target is value definite ({class:?})")]
    DegenerateOverlap { overlap: f64, class: StarClass },

    #[error("gadget contract not realised: {0}")]
    ContractViolated(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
