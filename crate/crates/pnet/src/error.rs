use std::io;
use std::path::Path;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors of the file layer and the CLI. Input problems exit with 2,
/// failures to write results exit with 1.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{file}: cannot read: {source}")]
    Read { file: String, source: io::Error },

    #[error("{file}: {location}: {reason}")]
    Network { file: String, location: String, reason: String },

    #[error("{file}: record {record}, column {column}: {reason}")]
    Dataset { file: String, record: usize, column: String, reason: String },

    #[error("{file}: {reason}")]
    DatasetHeader { file: String, reason: String },

    #[error("{file}: {reason}")]
    Budget { file: String, reason: String },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error(transparent)]
    Model(#[from] pnet_core::Error),

    #[error("{file}: cannot write: {source}")]
    Write { file: String, source: io::Error },

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Write { .. } | Error::Internal(_) => 1,
            _ => 2,
        }
    }

    pub(crate) fn read(path: &Path, source: io::Error) -> Self {
        Error::Read { file: path.display().to_string(), source }
    }

    pub(crate) fn write(path: &Path, source: io::Error) -> Self {
        Error::Write { file: path.display().to_string(), source }
    }
}
