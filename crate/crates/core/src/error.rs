use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("pole: denominator factor {factor} vanishes")]
    Pole { factor: String },

    #[error("series does not terminate; requires formal mode")]
    RequiresFormal,

    #[error("truncation order mismatch: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("series has zero constant term and cannot be inverted")]
    ZeroConstantTerm,

    #[error("coincident variables x_{i} = x_{j}")]
    CoincidentVariables { i: usize, j: usize },

    #[error("malformed series shape: {0}")]
    Shape(String),

    #[error("slot {slot} is not linearly solvable (degree {degree}); choose another slot")]
    NotLinearlySolvable { slot: String, degree: i32 },

    #[error("inconsistent constraint data: {0}")]
    Inconsistent(String),

    #[error("missing parameter slot {0}")]
    MissingSlot(String),

    #[error("constraint violated: {0}")]
    ConstraintViolated(String),

    #[error("retry budget of {budget} exhausted; last failure: {last}")]
    RetryBudgetExhausted { budget: usize, last: String },

    #[error("parameters cannot be mapped: {0}")]
    Unmappable(String),

    #[error("base q must satisfy 0 < q < 1, got {0}")]
    InvalidBase(String),

    #[error("unsupported dimension signature {dims:?} for {identity}")]
    Dimensions { identity: String, dims: Vec<usize> },

    #[error("{0}")]
    Parse(String),

    #[error("{0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
