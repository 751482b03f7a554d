use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the search pipeline.
///
/// The variants fall into two classes that the command line maps to distinct
/// exit codes: caller mistakes ([`Error::Contract`], [`Error::EmptyQuery`]) and
/// bad input data ([`Error::Data`], [`Error::Version`], [`Error::Io`]).
#[derive(Debug, Error)]
pub enum Error {
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("query has no searchable tokens")]
    EmptyQuery,

    #[error("data error: {0}")]
    Data(String),

    #[error("unsupported file header: expected `{expected}`, found `{found}`")]
    Version { expected: String, found: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by file contents or file access rather than by
    /// how an API or command was invoked.
    pub fn is_data_error(&self) -> bool {
        matches!(
            self,
            Error::Data(_) | Error::Version { .. } | Error::Io { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
