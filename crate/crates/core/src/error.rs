use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A function was evaluated where it is not finite or not defined.
    #[error("evaluation-domain error: {what} at {at}")]
    Domain { what: String, at: String },

    /// A matrix that has to be positive definite is not.
    #[error("not positive definite: {what} at {at}")]
    NotPositiveDefinite { what: String, at: String },

    /// The fiber Hessian of a projectivized potential is singular or indefinite.
    #[error("degenerate metric: {what} at {at}")]
    Degenerate { what: String, at: String },

    #[error("numerical failure: {what} at {at}")]
    NumericalFailure { what: String, at: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("configuration error:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn domain(what: impl Into<String>, at: impl std::fmt::Debug) -> Self {
        Error::Domain {
            what: what.into(),
            at: format!("{at:?}"),
        }
    }

    pub(crate) fn not_pd(what: impl Into<String>, at: impl std::fmt::Debug) -> Self {
        Error::NotPositiveDefinite {
            what: what.into(),
            at: format!("{at:?}"),
        }
    }
}
