use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("qubit index {index} out of range for {n} qubits")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("duplicate qubit index {0}")]
    DuplicateIndex(usize),
    #[error("state not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("matrix not hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("matrix not positive semidefinite (eigenvalue {0:e})")]
    NotPsd(f64),
    #[error("trace {0} differs from 1")]
    Trace(f64),
    #[error("dimension cap exceeded: {n} qubits > {cap}")]
    Cap { n: usize, cap: usize },
    #[error("operator is not a projector (deviation {0:e})")]
    NotProjector(f64),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("promise violated: {0}")]
    Promise(String),
    #[error("phase violation: {0}")]
    Phase(String),
    #[error("parse error at line {line}, column {column}: {msg}")]
    Parse { line: usize, column: usize, msg: String },
    #[error("schema version {found:?}, expected {expected:?}")]
    Schema { found: String, expected: String },
}

pub type Result<T> = std::result::Result<T, QError>;
