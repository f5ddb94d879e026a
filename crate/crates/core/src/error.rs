use std::path::PathBuf;

/// Errors produced anywhere in the core pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Inconsistent or unusable configuration (grids, sample rates, hyperparameters).
    #[error("configuration error: {0}")]
    Config(String),

    /// The chirp for these parameters has no samples in the requested band.
    #[error("unviable template m1={m1}, m2={m2}: {reason}")]
    UnviableTemplate { m1: f64, m2: f64, reason: String },

    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: String, got: String },

    /// Input with zero dynamic range cannot be min-max scaled.
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("training diverged at epoch {epoch}: non-finite loss")]
    Divergence { epoch: usize },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// A file was readable but its contents violate the format.
    #[error("corrupt file {path}: {message}")]
    Corrupt { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn corrupt(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Corrupt {
            path: path.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
