use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while loading data, inducing bias or learning.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("relation `{relation}`, line {line}: expected {expected} values, found {found}")]
    Arity {
        relation: String,
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("unknown relation `{0}`")]
    UnknownRelation(String),

    #[error("unknown attribute {relation}[{position}]")]
    UnknownAttribute { relation: String, position: usize },

    #[error("invalid data: {0}")]
    Validation(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{0}")]
    Intractable(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
