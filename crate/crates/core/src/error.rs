use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PebbleError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("graph is not a tree")]
    NotATree,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("search budget exceeded: visited more than {cap} states")]
    BudgetExceeded { cap: usize },

    #[error("series diverges: omega * n^epsilon = {ratio} must exceed 2")]
    DivergentSeries { ratio: f64 },

    #[error("bound undefined: expected count is zero")]
    UndefinedBound,

    #[error("bisection did not converge within {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error(
        "monotonicity violated: Pr[solvable] at t={t_low} ({p_low}) exceeds t={t_high} ({p_high}) beyond noise"
    )]
    MonotonicityViolation {
        t_low: u64,
        p_low: f64,
        t_high: u64,
        p_high: f64,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = PebbleError> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> PebbleError {
    PebbleError::InvalidParameter(msg.into())
}
