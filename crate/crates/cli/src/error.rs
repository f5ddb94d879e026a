use thiserror::Error;

/// Failures surfaced by the command-line front end, grouped by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl From<gwsae_core::Error> for CliError {
    fn from(e: gwsae_core::Error) -> Self {
        use gwsae_core::Error as E;
        let msg = e.to_string();
        match e {
            E::Config(inner) => CliError::Config(inner),
            E::UnviableTemplate { .. } => CliError::Config(msg),
            E::Divergence { .. } => CliError::Numerical(msg),
            _ => CliError::Data(msg),
        }
    }
}
