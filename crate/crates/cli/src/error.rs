use thiserror::Error;

/// Failures of a CLI run, each mapped to a documented exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("numerical contract violated: {0}")]
    Numerical(String),
    #[error("acceptance check failed: {0}")]
    Acceptance(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Numerical(_) => 3,
            CliError::Acceptance(_) => 4,
        }
    }

    pub fn io(path: impl std::fmt::Display, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_string(), source }
    }
}

impl From<zerocorr::Error> for CliError {
    fn from(e: zerocorr::Error) -> Self {
        use zerocorr::Error as E;
        match e {
            E::NearCoincident { .. } | E::NotPositiveSemidefinite { .. } | E::DegenerateSample | E::Internal(_) => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
