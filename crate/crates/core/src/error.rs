use thiserror::Error;

use crate::linprog::IterateState;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on shapes or values was violated by the caller.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Instance text could not be parsed. `line` and `field` are 1-based.
    #[error("parse error at line {line}, field {field}: {message}")]
    Parse {
        line: usize,
        field: usize,
        message: String,
    },

    /// The interior-point method could not produce a search direction.
    #[error("solver breakdown at iteration {}: {reason}", state.iteration)]
    SolverBreakdown {
        reason: String,
        state: Box<IterateState>,
    },

    /// A natural-extension solve ended without a certified optimum.
    #[error("solver failed on gamble {index}: {reason}")]
    SolverFailed { index: usize, reason: String },

    /// The lower prevision incurs sure loss (optimal phase-one margin is negative).
    #[error("lower prevision does not avoid sure loss (phase-one margin {margin:.3e})")]
    NotAvoidingSureLoss { margin: f64 },

    /// The credal set is non-empty but has no strictly interior point.
    #[error("credal set has empty interior (phase-one margin {margin:.3e})")]
    DegenerateAsl { margin: f64 },

    #[error("instance generation failed: {0}")]
    Generation(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}
