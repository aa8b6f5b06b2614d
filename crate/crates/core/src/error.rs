use crate::model::Model;

/// Errors shared by every module of the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("time {t} outside the validity interval [{lo}, {hi}]")]
    TimeOutOfRange { t: f64, lo: f64, hi: f64 },

    #[error("reference height {value} fell below its floor {floor} in cell {cell}")]
    FloorViolation { value: f64, floor: f64, cell: usize },

    /// A negative post-step height signals a CFL violation; the caller
    /// may retry with a smaller step.
    #[error("negative height {min_h} after a step of size {dt} at t = {t}")]
    NegativeHeight { min_h: f64, dt: f64, t: f64 },

    #[error("non-finite value at t = {t}")]
    NonFinite { t: f64 },

    #[error("operation requires the {required} model")]
    WrongModel { required: Model },

    #[error("empty ensemble")]
    EmptyEnsemble,

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
