use std::fmt;
use std::io;

use thiserror::Error;

/// Failure of a CLI run, mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(ConfigError),
    #[error(transparent)]
    Raster(#[from] crate::raster::RasterError),
    #[error("numerical failure: {0}")]
    Numerical(#[from] chainrec_core::Error),
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Raster(_) | CliError::Io(_) | CliError::Json(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

/// Config problem with the offending key and, when known, its line.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub key: Option<String>,
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    pub fn new(message: impl Into<String>) -> Self {
        ConfigError {
            key: None,
            line: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.key, self.line) {
            (Some(k), Some(l)) => write!(f, "config line {l}, key `{k}`: {}", self.message),
            (Some(k), None) => write!(f, "config key `{k}`: {}", self.message),
            (None, Some(l)) => write!(f, "config line {l}: {}", self.message),
            (None, None) => write!(f, "config: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}
