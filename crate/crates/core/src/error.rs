use thiserror::Error;

/// Errors raised anywhere in the workbench.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("density {value:e} at sample {index} is at or below the floor")]
    NonpositiveDensity { index: usize, value: f64 },

    #[error("capillarity coefficient out of domain: {0}")]
    CoefficientDomain(String),

    #[error("variant mismatch: {0}")]
    VariantMismatch(String),

    #[error("invalid model parameters: {}", .0.join("; "))]
    InvalidParams(Vec<String>),

    #[error("invalid integrator configuration: {}", .0.join("; "))]
    InvalidIntegrator(Vec<String>),

    #[error("positivity lost at t = {time}: density {value:e} at sample {index}")]
    PositivityLoss { time: f64, index: usize, value: f64 },

    #[error("non-finite values produced at t = {time}")]
    NonFinite { time: f64 },

    #[error("required time step {required:e} is below dt_min = {dt_min:e}")]
    StepUnderflow { required: f64, dt_min: f64 },

    #[error("delta = {0} is outside (0, 2)")]
    DeltaOutOfRange(f64),

    #[error("exponent p = {0} is out of range")]
    PExponentOutOfRange(f64),

    #[error("(p, q) = ({p}, {q}) violates 1/p + N/(2q) = 1/2 for N = {dim}")]
    ScalingPairInvalid { p: f64, q: f64, dim: usize },

    #[error("trajectory is empty")]
    EmptyTrajectory,

    #[error("resolution too small: only {active} dyadic shells are active")]
    ResolutionTooSmall { active: usize },

    #[error("index constraint violated: {0}")]
    IndexConstraintViolated(String),

    #[error("time exponents must satisfy 1 <= rho2 <= rho1 (got rho1 = {rho1}, rho2 = {rho2})")]
    ExponentOrderViolated { rho1: f64, rho2: f64 },

    #[error("field dump malformed at byte {offset}: {reason}")]
    DumpFormat { offset: u64, reason: String },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("configuration rejected: {}", .0.join("; "))]
    ConstraintViolation(Vec<String>),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
