use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Core(#[from] hallbraid_core::Error),
}

impl CliError {
    pub fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Self::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// 0 success, 2 config error, 3 contraction failure, 4 verification
    /// failure; anything else (I/O) is 1.
    pub fn exit_code(&self) -> i32 {
        use hallbraid_core::Error as E;
        match self {
            CliError::Config(_) | CliError::Parse { .. } => 2,
            CliError::Io { .. } => 1,
            CliError::Verification(_) => 4,
            CliError::Core(e) => match e {
                E::ContractionFailure { .. } => 3,
                E::Shape(_)
                | E::MeanMode(_)
                | E::Symmetry { .. }
                | E::InvalidParams(_)
                | E::BackwardTime(_)
                | E::Stiffness(_) => 2,
                E::Domain(_) | E::Spacing(_) | E::Resolution(_) | E::Pole(_) | E::Quadrature(_) => {
                    4
                }
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
