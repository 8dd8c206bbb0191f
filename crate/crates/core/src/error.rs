use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("cube at level {level} lies outside a grid of depth {depth}")]
    CubeOutsideGrid { level: u32, depth: u32 },

    #[error("cube index {index:?} out of range at level {level}")]
    CubeIndexOutOfRange { level: u32, index: Vec<u64> },

    #[error("degenerate measure: cube has zero mass")]
    DegenerateMeasure,

    #[error("non-doubling measure: zero-mass cube inside a positive-mass ancestor")]
    NonDoubling,

    #[error("grid resolution too coarse for subcube search (best alpha found: {best_alpha})")]
    ResolutionTooCoarse { best_alpha: f64 },

    #[error("value exceeds bracketing cap {cap:e}")]
    OverflowRange { cap: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("malformed Young function: {0}")]
    MalformedYoung(String),

    #[error("stopping-time precondition violated: root average {root_average} exceeds level {level}")]
    StoppingPrecondition { root_average: f64, level: f64 },

    #[error("cube functional must be positive: Y(Q) = {value}")]
    Functional { value: f64 },

    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
