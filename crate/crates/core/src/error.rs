use thiserror::Error;

/// Everything that can go wrong while setting up or solving a cloning problem.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CloneError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} = {value} lies outside [{lo}, {hi}]")]
    Domain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("slope diverges at t = {t} (y = 1); use the rescaled prior ratio instead")]
    Singular { t: f64 },

    #[error("root finder did not converge after {iterations} iterations, bracket [{lo}, {hi}]")]
    NoConvergence { iterations: usize, lo: f64, hi: f64 },

    #[error(
        "operating point ({q1}, {q2}) is not unitary: Gram mismatch {mismatch:e} exceeds {tol:e}"
    )]
    Infeasible {
        q1: f64,
        q2: f64,
        mismatch: f64,
        tol: f64,
    },

    #[error("Hilbert space dimension {dim} exceeds the cap of {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },

    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl CloneError {
    /// True for errors caused by bad input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            CloneError::InvalidProblem(_)
                | CloneError::InvalidArgument(_)
                | CloneError::Domain { .. }
                | CloneError::Infeasible { .. }
                | CloneError::DimensionTooLarge { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, CloneError>;
