use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse error category, stable across releases.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Io,
    Degenerate,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("unknown or unsupported format: {0}")]
    Format(String),

    #[error("invalid configuration at `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("no comparable semantic content: {0}")]
    NoComparableContent(String),

    #[error("length mismatch: {left} ground-truth points vs {right} predictions")]
    LengthMismatch { left: usize, right: usize },

    #[error("missing ray origin for point {0}")]
    MissingRayOrigin(usize),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io { .. } | Error::Parse { .. } | Error::Format(_) => ErrorKind::Io,
            Error::Config { .. } => ErrorKind::Config,
            Error::EmptyInput(_)
            | Error::NoComparableContent(_)
            | Error::LengthMismatch { .. }
            | Error::MissingRayOrigin(_) => ErrorKind::Degenerate,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }

    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}
