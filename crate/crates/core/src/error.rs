use thiserror::Error;

/// Errors produced by the tower, ring and search routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("generator count mismatch: {left} vs {right}")]
    Dimension { left: usize, right: usize },

    #[error("cannot parse polynomial: {0}")]
    PolynomialSyntax(String),

    #[error("invalid tower at stage {stage}: {reason}")]
    Validation { stage: usize, reason: String },

    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },

    #[error("stage index {index} out of range 1..={height}")]
    StageOutOfRange { index: usize, height: usize },

    #[error("permutation {images:?} is inadmissible: stage {stage} would depend on later stage {depends_on}")]
    InadmissiblePermutation {
        images: Vec<usize>,
        stage: usize,
        depends_on: usize,
    },

    #[error("invalid permutation {0:?}")]
    InvalidPermutation(Vec<usize>),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
