use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("probability must lie strictly between 0 and 1, got {0}")]
    ProbabilityOutOfRange(String),

    #[error("malformed probability literal {0:?}")]
    MalformedProbability(String),

    #[error("cannot combine an exact scalar with a floating-point scalar")]
    ModeMismatch,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("enumeration of size {size} exceeds the guard of {limit}")]
    EnumerationTooLarge { size: usize, limit: usize },

    #[error("state (a = {a}, b = {b}) lies outside the first-phase wedge a >= (k-1) b for k = {k}")]
    InvalidWedge { k: usize, a: usize, b: usize },

    #[error("the requested quantity is not defined in the critical regime q = 1/k")]
    CriticalRegime,

    #[error("the requested quantity is only defined for q < 1/k")]
    NotSupercritical,

    #[error("root solve did not converge: {0}")]
    RootSolve(String),

    #[error("series has a non-invertible constant term")]
    NonUnitConstant,

    #[error("argument {value} lies outside the domain [0, {limit})")]
    Domain { value: f64, limit: f64 },

    #[error("cannot take a match from an empty box")]
    EmptyBox,

    #[error("malformed manila configuration {0:?}")]
    MalformedManila(String),

    #[error("malformed path word {0:?}")]
    MalformedPath(String),
}

pub type Result<T> = std::result::Result<T, Error>;
