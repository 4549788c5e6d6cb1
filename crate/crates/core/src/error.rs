use thiserror::Error;

/// Errors raised by the numerical routines and the file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("rank deficient: {what} has minimum eigenvalue {min_eig:e}")]
    RankDeficient { what: String, min_eig: f64 },

    #[error("not completely positive: minimum Choi eigenvalue {min_eig:e}")]
    NotCompletelyPositive { min_eig: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("evidence has zero probability under the prior")]
    ZeroEvidence,

    #[error("perturbation too large: no step keeps the argument positive after {halvings} halvings")]
    PerturbationTooLarge { halvings: u32 },

    #[error("projection stalled after {iters} iterations (tp residual {tp_residual:e}, min eig {min_eig:e})")]
    ProjectionStall {
        iters: usize,
        tp_residual: f64,
        min_eig: f64,
    },

    #[error("parse error at line {line}: {message}")]
    ParseError { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn rank(what: impl Into<String>, min_eig: f64) -> Self {
        Error::RankDeficient {
            what: what.into(),
            min_eig,
        }
    }
}
