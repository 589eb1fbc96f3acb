use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("the set is empty")]
    EmptySet,

    #[error("point does not belong to the set")]
    NotInSet,

    #[error("{resource} budget exceeded (limit {limit})")]
    BudgetExceeded { resource: &'static str, limit: usize },

    #[error("invalid rational literal {0:?}")]
    ParseRational(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("objective unbounded below: {0}")]
    Unbounded(String),

    #[error("certificate construction failed: {0}")]
    Construction(String),

    #[error("numeric solver stopped after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("{0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
