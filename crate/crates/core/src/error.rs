use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("column {column} is numerically dependent on the preceding columns")]
    DegenerateColumn { column: usize },

    #[error("reduced steering vector vanished: the subspace annihilates the look direction")]
    DegenerateSubspace,

    #[error("reduced-rank weight vector is zero")]
    ZeroWeight,

    #[error("quadratic form aᴴΦa is numerically zero")]
    Singular,

    #[error("constraint cannot be met by the initial transformation matrix")]
    UnreachableConstraint,

    #[error("steering vector is zero")]
    ZeroSteering,

    #[error("matrix is not positive definite after loading")]
    NotPositiveDefinite,

    #[error("sample set is empty")]
    EmptySamples,

    #[error("unknown algorithm identifier")]
    UnknownAlgorithm,
}
