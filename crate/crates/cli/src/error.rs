use thiserror::Error;

/// Failures of one CLI invocation, each with its process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Domain(String),
    #[error("{0}")]
    NonConvergence(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
            CliError::NonConvergence(_) => 4,
        }
    }

    /// Prefixes the message with the flag or file it concerns.
    pub fn context(self, what: &str) -> Self {
        match self {
            CliError::Usage(m) => CliError::Usage(format!("{what}: {m}")),
            CliError::Domain(m) => CliError::Domain(format!("{what}: {m}")),
            CliError::NonConvergence(m) => CliError::NonConvergence(format!("{what}: {m}")),
            io => io,
        }
    }
}

impl From<expfam::Error> for CliError {
    fn from(e: expfam::Error) -> Self {
        use expfam::Error as E;
        match e {
            E::NonConvergence(_) => CliError::NonConvergence(e.to_string()),
            E::InvalidConfig(_) | E::MissingSample(_) => CliError::Usage(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}
