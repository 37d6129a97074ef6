use thiserror::Error;

/// Errors surfaced by validation and the iterative solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("space must contain at least one atom")]
    EmptySpace,
    #[error("atom {index} has nonpositive weight {weight}")]
    NonpositiveWeight { index: usize, weight: f64 },
    #[error("weights sum to {sum}, more than 1e-9 away from 1")]
    BadNormalization { sum: f64 },
    #[error("entry {index} is not finite")]
    NonFiniteEntry { index: usize },
    #[error("density entry {index} is negative: {value}")]
    NegativeDensity { index: usize, value: f64 },
    #[error("density has mu-mean {mean}, more than 1e-9 away from 1")]
    BadDensityNormalization { mean: f64 },
    #[error("exponent {p} out of range (need {min_allowed})")]
    BadExponent { p: f64, min_allowed: &'static str },
    #[error("alpha = {alpha} out of range (1, 50]")]
    BadOrder { alpha: f64 },
    #[error("weight function entry {index} is negative: {value}")]
    NegativeWeightFunction { index: usize, value: f64 },
    #[error("function has mu-mean {mean}, not centered within 1e-9")]
    NotCentered { mean: f64 },
    #[error("function is identically zero")]
    ZeroFunction,
    #[error("g must be nonnegative, entry {index} = {value}")]
    NegativeG { index: usize, value: f64 },
    #[error("root bracketing failed after {doublings} doublings")]
    NoConvergence { doublings: usize },
    #[error("projected gradient oracle did not converge in {iterations} iterations")]
    OracleNotConverged { iterations: usize },
    #[error("certificate is not dominated; c-bound check does not apply")]
    NotDominated,
    #[error("transport solver failed: {0}")]
    SolverFailure(String),
    #[error("metric space invalid: {0}")]
    BadMetric(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unknown profile: {0}")]
    UnknownProfile(String),
    #[error("unknown check id: {0}")]
    UnknownCheck(String),
    #[error("config error: {0}")]
    ConfigError(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
