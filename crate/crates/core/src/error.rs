use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("duplicate target qubit {0}")]
    DuplicateTarget(usize),
    #[error("qubit index {index} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("partial trace needs at least one kept qubit")]
    EmptyKeepList,
    #[error("measurement basis is not orthonormal (max deviation {deviation:e})")]
    NonOrthonormalBasis { deviation: f64 },
    #[error("measurement basis has {found} vectors, expected {expected}")]
    IncompleteBasis { expected: usize, found: usize },
    #[error("matrix is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("state is not normalized (norm² = {norm_sq})")]
    NotNormalized { norm_sq: f64 },
    #[error("invalid Kraus channel: completeness deviation {deviation:e}")]
    InvalidChannel { deviation: f64 },
    #[error("probability {0} outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("{0}")]
    InvalidArgument(String),
    #[error("{qubits}-qubit dense state exceeds the {limit}-qubit materialization limit")]
    TooLarge { qubits: usize, limit: usize },
    #[error("no Pauli correction reaches the target for outcome {outcome} ({protocol})")]
    NoPauliCorrection { protocol: String, outcome: String },
    #[error("target class {class} is not supported by {protocol}")]
    UnsupportedClass { protocol: String, class: String },
    #[error("receiver {0} is absent from the transcript")]
    ReceiverAbsent(String),
    #[error("OpenQASM parse error at line {line}: {message}")]
    Qasm { line: usize, message: String },
    #[error("unknown circuit id `{0}`")]
    UnknownCircuit(String),
    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
