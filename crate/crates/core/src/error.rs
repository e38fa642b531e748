use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("variable index {index} out of range for {nvars} variables")]
    IndexOutOfRange { index: usize, nvars: usize },

    #[error("coordinate x{index} is zero but the polynomial has a negative exponent in it")]
    ZeroCoordinate { index: usize },

    #[error("point outside X: {0}")]
    OutsideX(String),

    #[error("parse error at position {pos}: {message}")]
    Parse { pos: usize, message: String },

    #[error("invalid integrand: {0}")]
    InvalidSpec(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("non-generic parameters or tracking failure: {0}")]
    NonGeneric(String),

    #[error("segment hits singularity {point} (distance {distance:e})")]
    SegmentHitsSingularity { point: Complex64, distance: f64 },

    #[error("branch collapse: y = 0 at x = {0}")]
    BranchCollapse(Complex64),

    #[error("not a twisted cycle or branch tracking failed: closure residual {residual:e}")]
    NotTwistedCycle { residual: f64 },

    #[error("exponents are not rational: {0}")]
    NotRational(String),

    #[error("operator does not annihilate f^s: consistency defect {defect:e}")]
    NotAnnihilating { defect: f64 },

    #[error("not implemented: {0}")]
    NotImplemented(String),
}

impl Error {
    /// True for failures of a numerical procedure on otherwise valid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonGeneric(_)
                | Error::SegmentHitsSingularity { .. }
                | Error::BranchCollapse(_)
                | Error::NotTwistedCycle { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
