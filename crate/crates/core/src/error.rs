use thiserror::Error;

/// Errors raised by the solver, its diagnostics and its file formats.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid configuration value. `key` names the offending entry.
    #[error("invalid configuration `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("dimension mismatch: expected {expected} samples, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("grid mismatch: expected N={expected}, found N={found}")]
    GridMismatch { expected: usize, found: usize },

    /// Mean vorticity too large for the Biot-Savart inversion.
    #[error("mean vorticity {mean:e} exceeds tolerance {tolerance:e}")]
    MeanVorticity { mean: f64, tolerance: f64 },

    /// A non-finite coefficient appeared; `last_good_t` is the last time with a finite state.
    #[error("non-finite state encountered after t={last_good_t}")]
    NonFinite { last_good_t: f64 },

    #[error("exceeded max_steps={max_steps} at t={t}")]
    MaxSteps { max_steps: u64, t: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("checkpoint format error: {0}")]
    Format(String),

    #[error("diagnostics parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    /// Short machine-readable class used by the command-line front end.
    pub fn class(&self) -> &'static str {
        match self {
            Error::Config { .. } => "config",
            Error::DimensionMismatch { .. }
            | Error::GridMismatch { .. }
            | Error::Precondition(_) => "precondition",
            Error::MeanVorticity { .. } | Error::NonFinite { .. } | Error::MaxSteps { .. } => {
                "runtime"
            }
            Error::Format(_) | Error::Parse(_) => "format",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
