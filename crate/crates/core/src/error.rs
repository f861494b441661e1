use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown coin `{0}` (expected hadamard, fourier or grover)")]
    UnknownCoin(String),

    #[error("trap density {0} outside [0, 1]")]
    InvalidDensity(f64),

    #[error("step {time} would leave a lattice of half-width {half_width}")]
    Boundary { time: usize, half_width: usize },

    #[error("lattice mismatch: state half-width {state}, mask half-width {mask}")]
    DimensionMismatch { state: usize, mask: usize },

    #[error("site ({m}, {n}) lies outside a lattice of half-width {half_width}")]
    SiteOutOfRange { m: i64, n: i64, half_width: usize },

    #[error("empty ensemble")]
    EmptyEnsemble,

    #[error("ensemble members disagree: {0}")]
    EnsembleMismatch(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("survival series has no absorption to fit")]
    NothingAbsorbed,

    #[error("survival series invalid: {0}")]
    InvalidSurvival(String),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("malformed {what} at line {line}: {detail}")]
    Parse {
        what: &'static str,
        line: usize,
        detail: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
