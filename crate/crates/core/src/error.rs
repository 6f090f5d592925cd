use thiserror::Error;

/// Every failure the pipeline can report. Each variant maps to one CLI exit code.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("torus {lx}x{ly} too small: {reason}")]
    TorusTooSmall { lx: usize, ly: usize, reason: String },
    #[error("not a valid stabilizer group: {0}")]
    InvalidStabilizer(String),
    #[error("local constraint among generators: {0}")]
    LocalConstraint(String),
    #[error("topological condition violated: {0}")]
    NotTopological(String),
    #[error("charge analysis failed: {0}")]
    ChargeAnalysis(String),
    #[error("structural inconsistency: {0}")]
    Structural(String),
    #[error("invalid syndrome: {0}")]
    InvalidSyndrome(String),
    #[error("no logical qubits to protect")]
    NoLogicalQubits,
    #[error("invalid configuration: {0}")]
    Config(String),
}

impl Error {
    /// Stable process exit code for this failure class. Codes 1 and 2 are left to
    /// I/O and command-line usage errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse { .. } => 3,
            Error::Dimension(_) => 4,
            Error::TorusTooSmall { .. } => 5,
            Error::InvalidStabilizer(_) => 6,
            Error::LocalConstraint(_) => 7,
            Error::NotTopological(_) => 8,
            Error::ChargeAnalysis(_) => 9,
            Error::Structural(_) => 10,
            Error::InvalidSyndrome(_) => 11,
            Error::NoLogicalQubits => 12,
            Error::Config(_) => 13,
        }
    }
}
