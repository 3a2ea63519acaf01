use thiserror::Error;

/// A runtime postcondition failure.
///
/// The pipeline asserts every structural guarantee it relies on. Inputs
/// outside the supported graph class can therefore fail loudly instead of
/// producing an unverified answer. The `check` field names the violated
/// postcondition; `context` says where it happened.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnosis {
    pub check: &'static str,
    pub context: String,
}

impl std::fmt::Display for Diagnosis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} ({})", self.check, self.context)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex index {index} out of range for graph with {n} vertices")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("permutation domains do not match: {0} vs {1}")]
    DomainMismatch(usize, usize),
    #[error("{0}")]
    Precondition(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("diagnosed failure: {0}")]
    Diagnosed(Diagnosis),
    #[error("search budget exhausted")]
    Budget,
}

impl Error {
    pub fn diagnosed(check: &'static str, context: impl Into<String>) -> Self {
        Error::Diagnosed(Diagnosis {
            check,
            context: context.into(),
        })
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
