use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit index {qubit} out of range for {num_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, num_qubits: usize },

    #[error("invalid operation: {0}")]
    InvalidOp(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("register of {0} qubits exceeds the dense-simulation cap")]
    TooManyQubits(usize),

    #[error("channel `{label}` is not trace preserving (|sum K^dag K - I|_max = {deviation:e})")]
    NotCptp { label: String, deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPhysical { min_eigenvalue: f64 },

    #[error("incomplete tomography data: missing setting {0}")]
    IncompleteTomography(String),

    #[error("calibration: {0}")]
    Calibration(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_qubit(qubit: usize, num_qubits: usize) -> Result<()> {
    if qubit >= num_qubits {
        Err(Error::QubitOutOfRange { qubit, num_qubits })
    } else {
        Ok(())
    }
}
