use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input fell outside the domain of a model function.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("could not place station around AP {ap} after {attempts} attempts (placement radius {radius} m is inconsistent with the path-loss model)")]
    Placement { ap: usize, attempts: usize, radius: f64 },

    #[error("invalid config key `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error("no free airtime on any enabled link")]
    InfeasibleAllocation,

    #[error("unknown policy `{name}` (available: {available})")]
    UnknownPolicy { name: String, available: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config { key: key.into(), reason: reason.into() }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
