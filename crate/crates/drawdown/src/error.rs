use std::path::PathBuf;

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Ok = 0,
    Failure = 1,
    Config = 2,
    NonConvergence = 3,
    ValidationFailed = 4,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{0}")]
    Model(#[from] drawdown_core::Error),

    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("malformed solution file {path}: {reason}")]
    Solution { path: PathBuf, reason: String },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("value iteration did not converge for {0}")]
    NonConvergence(String),

    #[error("{failed} of {total} checks failed")]
    ValidationFailed { failed: usize, total: usize },
}

impl CliError {
    pub fn exit_status(&self) -> ExitStatus {
        match self {
            CliError::Config(_) | CliError::Read { .. } | CliError::Solution { .. } => ExitStatus::Config,
            CliError::Model(drawdown_core::Error::NonConvergence { .. }) | CliError::NonConvergence(_) => {
                ExitStatus::NonConvergence
            }
            CliError::Model(_) => ExitStatus::Config,
            CliError::Write { .. } => ExitStatus::Failure,
            CliError::ValidationFailed { .. } => ExitStatus::ValidationFailed,
        }
    }
}
