use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("index out of range: {0}")]
    IndexOutOfRange(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operator is not Hermitian (max |A - A^dag| = {defect:e})")]
    NotHermitian { defect: f64 },

    #[error("coincident ion positions {0} and {1} with a positive power-law exponent")]
    SingularDistance(usize, usize),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("state is not normalized (norm deviation {deviation:e})")]
    Normalization { deviation: f64 },

    #[error("Fock level {level} is outside the truncated space (fock_dim = {fock_dim})")]
    FockCutoff { level: usize, fock_dim: usize },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("numerical consistency check failed: {0}")]
    NumericalConsistency(String),

    #[error("Krylov substep underflow at t = {t} (substep {substep:e})")]
    SubstepUnderflow { t: f64, substep: f64 },

    #[error("invalid time grid: {0}")]
    InvalidTimeGrid(String),

    #[error("LAPACK {routine} failed with info = {info}")]
    Lapack { routine: &'static str, info: i32 },

    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("config: {0}")]
    ConfigSyntax(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
