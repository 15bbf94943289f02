use std::path::PathBuf;

use thiserror::Error;

use threshold_lab_core::Error as CoreError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cannot read `{path}`: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{path}: {source}")]
    Input { path: PathBuf, source: CoreError },

    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "invalid_config",
            CliError::Io { .. } => "io_error",
            CliError::Input { source, .. } | CliError::Core(source) => source.kind(),
        }
    }

    /// 2 configuration, 3 unreadable file, 4 invalid input, 5 valid input on
    /// which the requested computation is undefined or out of reach.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Input { source, .. } | CliError::Core(source) => {
                if source.is_input_error() {
                    4
                } else {
                    5
                }
            }
        }
    }
}
