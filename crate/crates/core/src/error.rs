use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("order s = {0} is outside (1/2, 1]")]
    InvalidOrder(f64),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("profiles live on different grids")]
    GridMismatch,
    #[error("density is negative at node {index} (value {value:e})")]
    NegativeDensity { index: usize, value: f64 },
    #[error("profile is not strictly positive at node {index}")]
    NonPositive { index: usize },
    #[error("profile increases at node {index} by {excess:e}")]
    NotMonotone { index: usize, excess: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("zero initial iterate with sigma = 0 is outside the domain of the map")]
    ZeroInitialIterate,
    #[error("no convergence after {iterations} iterations (last residual {last:e})")]
    NonConvergence { iterations: usize, last: f64, history: Vec<f64> },
    #[error("grid policy exhausted at L = {length} (tail ratio {tail:e})")]
    GridPolicyExhausted { length: f64, tail: f64 },
    #[error("weight violates Assumption (A): {0}")]
    AssumptionViolation(String),
    #[error("operation requires a constant weight")]
    NonConstantWeight,
    #[error("singular linear system")]
    SingularSystem,
    #[error("eigensolver failed: {0}")]
    Eigen(String),
    #[error("insufficient decay in the fit window: {0}")]
    InsufficientDecay(String),
    #[error("uniqueness probe inconclusive: start {start} failed ({reason})")]
    ProbeInconclusive { start: usize, reason: String },
    #[error("continuation stalled at {parameter} = {value}")]
    ContinuationStalled { parameter: &'static str, value: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
