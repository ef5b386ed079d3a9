use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("FCIDUMP line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("qubit count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },

    #[error("index {index} out of range for {limit} modes")]
    IndexOutOfRange { index: usize, limit: usize },

    #[error("at most 64 qubits are supported, got {0}")]
    TooManyQubits(usize),

    #[error("pauli rotation needs a unit-modulus coefficient, got {0}")]
    NonUnitCoefficient(num_complex::Complex64),

    #[error("not a double-excitation generator: {0}")]
    NotDoubleExcitation(String),

    #[error("unsupported electron configuration: {0}")]
    UnsupportedConfiguration(String),

    #[error("objective returned a non-finite value {value} at evaluation {evaluation}")]
    NonFinite { value: f64, evaluation: usize },

    #[error("operator is not hermitian (max deviation {0:e})")]
    NonHermitian(f64),

    #[error("hilbert space too large: {n_qubits} qubits exceeds the limit of {limit}")]
    DimensionTooLarge { n_qubits: usize, limit: usize },

    #[error("operator pool is empty")]
    EmptyPool,

    #[error("commutators have not been precomputed for operator {0}")]
    MissingCommutator(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("fixtures disagree: {0}")]
    MismatchedFixtures(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Usage and I/O problems map to exit status 2, everything else to 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Parse { .. } | Error::InvalidConfig(_) => 2,
            _ => 1,
        }
    }
}
