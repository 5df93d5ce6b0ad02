use thiserror::Error;

/// Errors raised by the certificate pipeline and the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A precondition on the problem data or an argument does not hold.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// `b^2/(4a) + c` must be strictly positive.
    #[error("reduced reaction coefficient c_tilde = {c_tilde} must be > 0")]
    NonPositiveReaction { c_tilde: f64 },

    /// The splitting constants cannot satisfy the strict inequalities.
    #[error("infeasible split parameters: {0}")]
    Infeasible(String),

    /// A solution value left the admissible range.
    #[error("instability at t = {t}, x = {x}: value {value}")]
    Instability { t: f64, x: f64, value: f64 },

    /// A pivot of the tridiagonal system vanished.
    #[error("singular row {row} in tridiagonal solve")]
    SingularRow { row: usize },

    /// Trajectories or grids do not line up.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// No analytic solution is registered for the given problem.
    #[error("no registered exact-solution oracle: {0}")]
    NoOracle(String),

    /// A fault raised while running one trial of a scenario suite.
    #[error("trial {index}: {source}")]
    Trial { index: usize, source: Box<Error> },
}

impl Error {
    /// True for faults raised by the time integrator.
    pub fn is_solver_fault(&self) -> bool {
        match self {
            Error::Instability { .. } | Error::SingularRow { .. } => true,
            Error::Trial { source, .. } => source.is_solver_fault(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
