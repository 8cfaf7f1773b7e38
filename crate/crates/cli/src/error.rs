use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] shuttle_core::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Parse {
        path: PathBuf,
        #[source]
        source: Box<toml::de::Error>,
    },

    #[error("invalid config: {0}")]
    Invalid(String),

    /// The configured protocol cannot reach the target in time.
    #[error("infeasible: {0}")]
    Infeasible(String),

    /// Sweep rows that broke down numerically; the other rows were written.
    #[error("{failed} of {total} rows failed numerically")]
    RowsFailed { failed: usize, total: usize },
}

impl CliError {
    /// 1 for usage and configuration errors, 2 for infeasible physics,
    /// 3 for numerical failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_infeasible() => 2,
            CliError::Core(e) if e.is_numerical() => 3,
            CliError::Core(shuttle_core::Error::GridMismatch(_)) => 3,
            CliError::Infeasible(_) => 2,
            CliError::RowsFailed { .. } => 3,
            _ => 1,
        }
    }
}
