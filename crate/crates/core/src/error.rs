use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("format error in {context}: {message}")]
    Format { context: String, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("utterance {utterance_id}: {source}")]
    Utterance {
        utterance_id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("unknown utterance id {0:?}")]
    UnknownUtterance(String),

    #[error("undefined metric: {0}")]
    UndefinedMetric(&'static str),

    #[error("infeasible placement: {0}")]
    InfeasiblePlacement(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn format(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Format { context: context.into(), message: message.into() }
    }

    pub(crate) fn in_utterance(self, utterance_id: &str) -> Self {
        Error::Utterance { utterance_id: utterance_id.to_owned(), source: Box::new(self) }
    }

    /// Whether the error was caused by bad input rather than a runtime failure.
    pub fn is_invalid_input(&self) -> bool {
        match self {
            Error::Io { .. } => false,
            Error::Utterance { source, .. } => source.is_invalid_input(),
            _ => true,
        }
    }
}
