use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] dimer_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Input(String),
    #[error("fit did not converge after {iterations} iterations (scaled gradient {gradient_norm:e})")]
    NotConverged { iterations: usize, gradient_norm: f64 },
    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 verification failure, 2 input or domain error, 3 fit non-convergence.
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::VerificationFailed(_) => 1,
            CliError::NotConverged { .. } => 3,
            _ => 2,
        })
    }
}

pub type CliResult<T> = Result<T, CliError>;
