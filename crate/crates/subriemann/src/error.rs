use std::path::PathBuf;

use crate::parse::ParseError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("config: {0}")]
    Config(String),
    #[error("fixture `{name}`: {message}")]
    Fixture { name: String, message: String },
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Core(#[from] subriemann_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn fixture(name: &str, message: impl Into<String>) -> Self {
        Error::Fixture { name: name.to_string(), message: message.into() }
    }

    /// Whether the error comes from the configuration or the fixtures rather
    /// than from a computation.
    pub fn is_setup(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Fixture { .. } | Error::Parse(_) | Error::Io { .. } | Error::Json { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
