use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter `{name}` out of range: {value} (expected {expected})")]
    OutOfRange {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("inverse collision map undefined for restitution coefficient e = 0")]
    NonInvertible,

    #[error("degenerate geometry: {0}")]
    Degenerate(&'static str),

    #[error("invalid rate function: {0}")]
    InvalidRate(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("grids do not match: {0}")]
    GridMismatch(String),

    #[error("profile not decayed at x_max: |phi(x_max)| = {tail:e}")]
    NotDecayed { tail: f64 },

    #[error("reconstruction clipped mass {clipped:e} exceeds budget; try x_max >= {suggested_x_max}")]
    ClippedMass { clipped: f64, suggested_x_max: f64 },

    #[error("mass {mass} deviates from 1 by more than {tol:e}")]
    MassDefect { mass: f64, tol: f64 },

    #[error("characteristic bound violated at t = {time}: max |phi| = {max_abs}")]
    BoundViolation { time: f64, max_abs: f64 },

    #[error("fit needs at least 5 points in window, got {0}")]
    TooFewPoints(usize),

    #[error("non-positive sample {value} at t = {time} in fit window")]
    NonPositive { time: f64, value: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
