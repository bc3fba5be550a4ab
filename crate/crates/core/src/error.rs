use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the scheduling library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A caller broke the contract of an operation (mismatched lengths, wrong precondition).
    #[error("contract violation: {0}")]
    Contract(String),
    /// An instance or dump file is malformed; `record` names the offending entry.
    #[error("parse error in {record}: {message}")]
    Parse { record: String, message: String },
    /// Instance synthesis could not reach the requested size.
    #[error("generation error: {0}")]
    Generation(String),
    /// An iterative numerical routine failed to converge.
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn parse(record: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            record: record.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
