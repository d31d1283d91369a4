use thiserror::Error;

/// Errors raised by the kinetic solver.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid model parameter: {0}")]
    InvalidModel(String),

    #[error("grid axis {axis} has {size} points; at least 2 are required")]
    GridTooSmall { axis: usize, size: usize },

    #[error("grid has {dims} axes but the model has dimension {dim}")]
    DimensionMismatch { dims: usize, dim: usize },

    #[error("weak-order rotation is singular at J_k = 0")]
    SingularWeakRotation,

    #[error("distribution value {value} at index {index} lies outside [0, 1]")]
    Unphysical { index: usize, value: f64 },

    #[error("invalid kernel configuration: {0}")]
    InvalidKernel(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("state has {got} entries, expected {expected}")]
    StateShape { expected: usize, got: usize },

    #[error("step rejected at t = {t}: overshoot {overshoot:e} exceeds {limit:e}")]
    StepRejected { t: f64, overshoot: f64, limit: f64 },

    #[error("non-finite value in state at t = {t}")]
    NonFinite { t: f64 },

    #[error("invalid integrator configuration: {0}")]
    InvalidIntegrator(String),

    #[error("ill-conditioned equilibrium fit: {0}")]
    IllConditionedFit(String),

    #[error("grid with {points} points exceeds the brute-force limit of {limit}")]
    GridTooLarge { points: usize, limit: usize },

    #[error("invalid limit-check input: {0}")]
    InvalidCheck(String),
}

pub type Result<T> = std::result::Result<T, Error>;
