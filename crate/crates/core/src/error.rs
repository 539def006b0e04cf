use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed scenario: {0}")]
    Parse(String),

    #[error("invalid scenario field `{field}`: {reason}")]
    Validation { field: String, reason: String },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("cannot write output: {0}")]
    Output(String),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
