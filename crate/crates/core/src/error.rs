use std::path::PathBuf;

use thiserror::Error;

/// Broad failure class, used by the command line front end to pick an exit code.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ErrorKind {
    /// Malformed or inconsistent configuration (manifest, grammar, rule set).
    Config,
    /// Unreadable or malformed input data (masks, annotations, transcripts).
    Data,
    /// Well-formed input that violates a semantic check.
    Validation,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Manifest { path: PathBuf, message: String },

    #[error("stream {class}: mask for frame {frame} not found at {path}")]
    MissingMaskFrame {
        class: String,
        frame: usize,
        path: PathBuf,
    },

    #[error("stream {class}, frame {frame}: dimensions {found_w}x{found_h} differ from {expected_w}x{expected_h}")]
    DimensionMismatch {
        class: String,
        frame: usize,
        expected_w: usize,
        expected_h: usize,
        found_w: usize,
        found_h: usize,
    },

    #[error("{path}: {message}")]
    Image { path: PathBuf, message: String },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{origin}:{line}: {message}")]
    Config {
        origin: String,
        line: usize,
        message: String,
    },

    #[error("invalid context value {0:?}: expected five decimal digits")]
    ContextValue(String),

    #[error("{0}")]
    Validation(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Manifest { .. } | Error::Config { .. } => ErrorKind::Config,
            Error::Validation(_) => ErrorKind::Validation,
            _ => ErrorKind::Data,
        }
    }

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

pub type Result<T, E = Error> = std::result::Result<T, E>;
