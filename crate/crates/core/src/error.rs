use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or inconsistent input object. `path` locates the field.
    #[error("validation error at {path}: {message}")]
    Validation { path: String, message: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("non-finite entry at {0}")]
    NonFinite(String),

    #[error("matrix not Hermitian (asymmetry {asymmetry})")]
    NotHermitian { asymmetry: f64 },

    #[error("state family is not tomographically complete; missing directions: {}", missing.join(", "))]
    TomographyIncomplete { missing: Vec<String> },

    #[error("unknown outcome label `{0}`")]
    UnknownOutcome(String),

    #[error("unknown state index {0}")]
    UnknownState(usize),

    #[error("experiment catalog has no line experiment for line {line}")]
    LineIncomplete { line: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Process exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation { .. }
            | Error::DimensionMismatch { .. }
            | Error::NotNormalized { .. }
            | Error::NonFinite(_)
            | Error::NotHermitian { .. }
            | Error::UnknownOutcome(_)
            | Error::UnknownState(_) => 2,
            Error::TomographyIncomplete { .. }
            | Error::LineIncomplete { .. }
            | Error::Precondition(_) => 3,
            Error::Numerical(_) => 4,
        }
    }
}
