use std::path::PathBuf;

use erp_core::ErpError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Args(#[from] clap::Error),

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Core(#[from] ErpError),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    /// 0 success, 2 usage or unsupported input, 3 numerical failure, 4 I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Args(e) if !e.use_stderr() => 0,
            CliError::Args(_) | CliError::Usage(_) => 2,
            CliError::Core(ErpError::Domain(_) | ErpError::Unsupported(_)) => 2,
            CliError::Core(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}
