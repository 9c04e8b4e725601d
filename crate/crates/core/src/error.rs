use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("atom number {requested} exceeds the configured maximum {max}")]
    TooManyAtoms { requested: usize, max: usize },

    #[error("occupation pair ({n1}, {n2}) is not a valid state for N = {total_n}")]
    InvalidOccupation { n1: usize, n2: usize, total_n: usize },

    #[error("unknown operator label `{0}`")]
    UnknownLabel(String),

    #[error("operands live in different particle-number sectors (N = {left} vs N = {right})")]
    SectorMismatch { left: usize, right: usize },

    #[error("matrix `{label}` is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { label: String, deviation: f64 },

    #[error("state selector must be 1, 2 or 3, got {0}")]
    InvalidSelector(u8),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("coupling ratio r must be {requirement}, got {value}")]
    InvalidRatio { value: f64, requirement: &'static str },

    #[error("invalid time grid: {0}")]
    InvalidTimes(String),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("initial state violates constraint `{constraint}` by {residual:e}")]
    ConstraintViolation {
        constraint: &'static str,
        residual: f64,
    },

    #[error("{quantity} drifted by {drift:e} (relative) at tau = {time}")]
    ToleranceViolation {
        quantity: &'static str,
        time: f64,
        drift: f64,
    },

    #[error("step size underflow at tau = {time}")]
    StepSizeUnderflow { time: f64 },

    #[error("root bracketing failed: {0}")]
    Bracket(String),
}
