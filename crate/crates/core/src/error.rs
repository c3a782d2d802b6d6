use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("{nqubits} qubits exceeds the dense limit of {limit}")]
    DenseLimit { nqubits: usize, limit: usize },

    #[error("{nqubits} qubits exceeds the state-vector limit of {limit}")]
    StateLimit { nqubits: usize, limit: usize },

    #[error("qubit count {0} is outside the supported range 1..=64")]
    QubitCount(usize),

    #[error("operator is not Hermitian (max imaginary coefficient {0:e})")]
    NonHermitian(f64),

    #[error("non-finite coefficient for pattern {0}")]
    NonFinite(String),

    #[error("invalid Pauli pattern {0:?}")]
    Pattern(String),

    #[error("zero detuning on driven qubit {0}")]
    ZeroDetuning(usize),

    #[error("invalid parameters: {0}")]
    Params(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("structural check failed: {0}")]
    Structure(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
