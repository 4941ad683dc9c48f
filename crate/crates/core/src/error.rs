use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("grid size {0} is not a power of two >= 8")]
    InvalidGridSize(usize),
    #[error("unsupported spatial dimension {0} (only 1 and 2)")]
    InvalidDimension(usize),
    #[error("box length must be positive and finite, got {0}")]
    InvalidLength(f64),
    #[error("expected {expected} values, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("non-finite value {value} at position {position:?}")]
    NonFinite { position: Vec<f64>, value: String },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("cost guard: {0}")]
    CostGuard(String),
    #[error("non-finite state after step {step}")]
    NonFiniteState { step: usize },
    #[error("boundary amplitude {ratio:e} of the peak exceeds {limit:e}")]
    BoundaryGuard { ratio: f64, limit: f64 },
    #[error("spectral tail fraction {fraction:e} at t = {t} exceeds {limit:e}")]
    Underresolved { t: f64, fraction: f64, limit: f64 },
    #[error("snapshot format: {0}")]
    Snapshot(String),
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
