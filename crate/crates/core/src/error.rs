use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid arity: {0}")]
    InvalidArity(String),

    #[error("bitstring {0} is not canonical (leading bit must be 0)")]
    NotCanonical(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid measurement subset: {0}")]
    InvalidSubset(String),

    #[error("{qubits} qubits exceeds the dense simulation cap of {max}")]
    ResourceLimit { qubits: usize, max: usize },

    #[error("closed form unavailable: {0}")]
    ClosedFormUnavailable(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cannot parse label {input:?}: {reason}")]
    Parse { input: String, reason: String },
}
