use thiserror::Error;

use crate::spectral::Field;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad failure category; the CLI maps these onto process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad input, configuration, or a violated hypothesis.
    Config,
    /// A numerical guard tripped (aliasing, non-finite values, under-resolution).
    Numerical,
    /// Filesystem or serialization failure.
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field is in {found} space, expected {expected} space")]
    WrongSpace {
        expected: &'static str,
        found: &'static str,
    },

    #[error("grid mismatch between fields")]
    GridMismatch,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "zero-mode obstruction: homogeneous norm with gamma = {gamma} needs a vanishing zero mode, \
         but it carries {fraction:.3e} of the L2 mass"
    )]
    ZeroModeObstruction { gamma: f64, fraction: f64 },

    #[error("multiplier is not finite at xi = {xi:?}")]
    NonFiniteMultiplier { xi: Vec<f64> },

    #[error("aliasing guard: top third of the spectrum carries {fraction:.3e} of the L2 mass (limit {limit:.1e})")]
    Aliasing {
        fraction: f64,
        limit: f64,
        /// Per-shell spectral mass, lowest |k| first.
        spectrum: Vec<f64>,
    },

    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64, last_good: Box<Field> },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("under-resolved: {0}")]
    UnderResolved(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("field file: {0}")]
    Format(String),
}

impl ErrorKind {
    pub fn name(self) -> &'static str {
        match self {
            ErrorKind::Config => "config",
            ErrorKind::Numerical => "numerical",
            ErrorKind::Io => "io",
        }
    }
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Aliasing { .. } | Error::NonFinite { .. } | Error::UnderResolved(_) => {
                ErrorKind::Numerical
            }
            Error::Io(_) | Error::Json(_) | Error::Csv(_) | Error::Format(_) => ErrorKind::Io,
            _ => ErrorKind::Config,
        }
    }
}
