use thiserror::Error;

/// Errors raised by the algebra and evaluation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coefficient of a word of length {requested} requested beyond truncation {available}")]
    Truncation { requested: usize, available: usize },

    #[error("series is proper (zero constant term) and has no catenation inverse")]
    NotInvertible,

    #[error("series has a nonzero constant term; a proper series is required")]
    NotProper,

    #[error("feedback degree is undefined for words containing bracket letters")]
    DegreeUndefined,

    #[error("letter {0} is not in the representation alphabet")]
    ForeignLetter(String),

    #[error("representation dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("transition matrix is singular at step {step}")]
    SingularTransition { step: usize },

    #[error("input sup-norm {norm} is outside the invertibility region (bound {bound})")]
    OutsideInvertibilityRegion { norm: f64, bound: f64 },

    #[error("step {requested} exceeds signal horizon {horizon}")]
    Horizon { requested: usize, horizon: usize },

    #[error("grid index {index} outside signal with {len} points")]
    OutsideGrid { index: usize, len: usize },

    #[error("Picard iteration did not contract within {iterations} iterations (last update {last_update:e})")]
    NonContraction { iterations: usize, last_update: f64 },

    #[error("{0}")]
    Domain(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
