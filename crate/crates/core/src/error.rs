use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("evolution time must be positive, got {0}")]
    InvalidTime(f64),

    #[error("quadrature did not reach tolerance {tolerance:e} at x = {x} within {panels} panels (residual estimate {residual:e})")]
    Quadrature {
        x: f64,
        residual: f64,
        tolerance: f64,
        panels: usize,
    },

    #[error("grid must contain at least one point")]
    EmptyGrid,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid operator '{name}': {reason}")]
    InvalidOperator { name: String, reason: String },

    #[error("composed state grew to {size} point masses, above the cap of {cap}")]
    StateExplosion { size: usize, cap: usize },

    #[error("naive evaluation supports n <= {max}, got n = {n}")]
    NaiveBudget { n: usize, max: usize },

    #[error("composition count must be at least 1")]
    ZeroSteps,

    #[error("tangency order must be at least 1")]
    InvalidOrder,

    #[error("array lengths differ: {left} vs {right}")]
    ShapeMismatch { left: usize, right: usize },

    #[error("cannot take the logarithm of error {error} at n = {n}")]
    LogDomain { n: usize, error: f64 },

    #[error("insufficient data: regression needs at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("unknown initial condition '{0}'")]
    UnknownCondition(String),

    #[error("unknown operator '{0}'")]
    UnknownOperator(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{condition}/{operator}{}: {source}", n.map(|n| format!(" at n = {n}")).unwrap_or_default())]
    Annotated {
        condition: String,
        operator: String,
        n: Option<usize>,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn annotate(self, condition: &str, operator: &str, n: Option<usize>) -> Self {
        Error::Annotated {
            condition: condition.to_string(),
            operator: operator.to_string(),
            n,
            source: Box::new(self),
        }
    }
}
