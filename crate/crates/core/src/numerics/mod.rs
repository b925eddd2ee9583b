//! Numerical building blocks: Hermitian solves, monotone bisection and a
//! small concave QCQP engine.

pub mod bisect;
pub mod linalg;
pub mod qcqp;
pub mod quad;

pub use bisect::{bisect, bisect_counted, Bisection};
pub use linalg::{herm_solve, CMatrix, CVector, HermEigen};
pub use quad::adaptive_simpson;
pub use qcqp::{project_magnitude_caps, solve_concave_qcqp, QcqpOptions, QcqpProblem, QcqpSolution};

#[derive(Debug, thiserror::Error)]
pub enum NumericsError {
    #[error("system is singular or ill-conditioned (condition number {condition:e})")]
    SingularSystem { condition: f64 },
    #[error("no sign change on [{lo}, {hi}] (f = {f_lo}, {f_hi})")]
    NoBracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("constraint bound {bound} is negative")]
    Infeasible { bound: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPsd { min_eigenvalue: f64 },
    #[error("objective is unbounded on the feasible set")]
    Unbounded,
    #[error("iteration limit reached with KKT residual {kkt_residual:e}")]
    MaxIterExceeded { kkt_residual: f64, partial: Box<QcqpSolution> },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("unsupported problem: {0}")]
    Unsupported(&'static str),
}
