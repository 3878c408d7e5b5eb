use thiserror::Error;

use crate::factor::VarId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("variable {0} is not bound in the assignment")]
    MissingVariable(VarId),

    #[error("variable {0} is not in scope")]
    UnknownVariable(VarId),

    #[error("variable {0} has already been eliminated")]
    AlreadyEliminated(VarId),

    #[error("variable {var} has cardinality {left} in one operand and {right} in the other")]
    CardinalityMismatch {
        var: VarId,
        left: usize,
        right: usize,
    },

    #[error("invalid factor: {0}")]
    InvalidFactor(String),

    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),

    #[error("invalid symmetry partition: {0}")]
    InvalidPartition(String),

    #[error(
        "group {group:?} is not interchangeable: {left:?} and {right:?} have different potentials"
    )]
    NotSymmetric {
        group: Vec<VarId>,
        left: Vec<usize>,
        right: Vec<usize>,
    },

    #[error("value {value} out of range (limit {limit})")]
    OutOfRange { value: u128, limit: u128 },

    #[error("integer overflow while computing {0}")]
    Overflow(&'static str),

    #[error("problem too large: {size} exceeds limit {limit}")]
    TooLarge { size: u128, limit: u128 },

    #[error("order is not a permutation of the live variables: {0}")]
    NotAPermutation(String),

    #[error("factor {0} carries no potential table")]
    NotMaterialized(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("factor {factor}: {reason}")]
    Validation { factor: usize, reason: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
