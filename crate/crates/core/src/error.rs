use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("expected {expected} bodies, found {found}")]
    WrongBodyCount { expected: usize, found: usize },

    #[error("value out of range: {0}")]
    OutOfRange(String),

    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },

    #[error("duplicate support point {0:?}")]
    DuplicateSupport(Vec<i64>),

    #[error("variable index x{index} outside 1..={n}")]
    VariableIndex { index: usize, n: usize },

    #[error("displacement still non-generic after {0} attempts")]
    NonGeneric(usize),

    #[error("complex is not balanced: {0}")]
    Unbalanced(String),

    #[error("function is not {m}-subharmonic at {count} interior node(s)")]
    NotMSubharmonic { m: usize, count: usize },

    #[error("mollifier radius {h} is invalid for this grid: {reason}")]
    Mollifier { h: f64, reason: String },

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("invalid capacity problem: {0}")]
    Problem(String),

    #[error("iteration did not converge after {iterations} sweeps (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("invalid subspace: {0}")]
    Subspace(String),

    #[error("malformed document: {0}")]
    Format(String),

    #[error("f <= C|x| + D fails at {0:?}")]
    GrowthBound(Vec<f64>),

    #[error("directional limits did not settle in {} direction(s)", .0.len())]
    NonConvergentLimits(Vec<Vec<f64>>),

    #[error("no max of linear forms fits the sampled limits: {0}")]
    IndicatorFit(String),
}
