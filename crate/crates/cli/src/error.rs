use std::fmt;
use std::path::Path;

use bkmatch_core::embeddings::EmbeddingError;
use bkmatch_core::eval::EvalError;
use bkmatch_core::ingest::{IngestError, NTriplesError};
use bkmatch_core::model::ConfigError;
use bkmatch_core::store::PackError;

/// Configuration problems exit with 1, problems in the data with 2.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Data(_) => 2,
        }
    }

    pub fn write_failed(path: &Path, e: impl fmt::Display) -> Self {
        CliError::Data(format!("cannot write {}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

macro_rules! data_error {
    ($($t:ty),*) => {
        $(impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Data(e.to_string())
            }
        })*
    };
}

data_error!(IngestError, NTriplesError, PackError, EmbeddingError, EvalError, csv::Error, std::io::Error);

/// Fails with a configuration error unless `path` exists.
pub fn require_exists(path: &Path, what: &str) -> Result<(), CliError> {
    if path.exists() {
        Ok(())
    } else {
        Err(CliError::Config(format!("{what} {} does not exist", path.display())))
    }
}
