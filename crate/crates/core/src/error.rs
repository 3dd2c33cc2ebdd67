use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("malformed walk: {0}")]
    MalformedWalk(String),

    #[error("argument outside the admissible domain: {0}")]
    Domain(String),

    #[error("solver did not converge after {iterations} iterations (last residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("size guard exceeded: {0}")]
    Guard(String),

    #[error("budget exhausted after {trials} trials")]
    BudgetExhausted { trials: u64 },

    #[error("table of {needed} cells exceeds the memory budget of {budget} cells")]
    MemoryBudget { needed: u64, budget: u64 },

    #[error("covariance is not positive semi-definite (smallest eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("bad file format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_)
            | Error::InvalidPath(_)
            | Error::MalformedWalk(_)
            | Error::Format(_)
            | Error::Json(_)
            | Error::Io(_) => 1,
            Error::Domain(_)
            | Error::NoConvergence { .. }
            | Error::NotPsd(_)
            | Error::Degenerate(_)
            | Error::Guard(_) => 2,
            Error::BudgetExhausted { .. } | Error::MemoryBudget { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
