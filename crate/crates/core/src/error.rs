use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Fock dimension {dim} (need at least 2)")]
    InvalidDimension { dim: usize },

    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coherent state |alpha| = {alpha_abs} is not safely representable in dim {dim}")]
    TruncationLeakage { alpha_abs: f64, dim: usize },

    #[error("trajectory invalid at t = {time}: tail population {population:e} exceeds bound {bound:e}")]
    TrajectoryInvalid {
        time: f64,
        population: f64,
        bound: f64,
    },

    #[error("step size underflow at t = {time} (h = {step:e})")]
    StepUnderflow { time: f64, step: f64 },

    #[error("jump requested from a dark state (<L+L> = {rate:e})")]
    DarkStateJump { rate: f64 },

    #[error("trace drifted by {drift:e} at t = {time}")]
    TraceDrift { time: f64, drift: f64 },

    #[error("undamped drive has no steady state (gamma = 0)")]
    UndampedResonance,

    #[error("classical trajectory diverged at t = {time}")]
    Divergence { time: f64 },

    #[error("empty window: {0}")]
    EmptyWindow(String),

    #[error("segment length {segment} exceeds series length {len}")]
    SegmentTooLong { segment: usize, len: usize },

    #[error("spectra are not on a common frequency grid")]
    GridMismatch,

    #[error("no column `{column}` in {path}")]
    MissingColumn { column: String, path: String },

    #[error("{path}, row {row}: `{field}` is not a number")]
    BadField { path: String, row: usize, field: String },

    #[error("unknown validation check `{0}`")]
    UnknownCheck(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
