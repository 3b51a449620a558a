use alloc::string::String;

/// Errors raised by constructors and operations of this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension {0} is outside the supported range 1..=8")]
    UnsupportedDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("tensor degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("slot {slot} out of range for a tensor of degree {degree}")]
    SlotOutOfRange { slot: usize, degree: usize },

    #[error("matrix is not symmetric: entries ({i},{j}) and ({j},{i}) differ")]
    NotSymmetric { i: usize, j: usize },

    #[error(
        "matrix is not positive definite: leading principal minor of order {minor} is not positive"
    )]
    NotPositiveDefinite { minor: usize },

    #[error("cubic form is not totally symmetric at index ({i},{j},{k})")]
    NotTotallySymmetric { i: usize, j: usize, k: usize },

    #[error("vectors are linearly dependent")]
    DependentVectors,

    #[error("zero vector is not allowed here")]
    ZeroVector,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(
        "point {coord} of axis {axis} is closer than the required margin to the domain boundary"
    )]
    BoundaryMargin { axis: usize, coord: f64 },

    #[error("operation requires a fully periodic chart")]
    NotPeriodic,

    #[error("unsupported tensor degree {0}")]
    UnsupportedDegree(usize),

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("expression error: {0}")]
    Expr(String),
}

pub type Result<T> = core::result::Result<T, Error>;
