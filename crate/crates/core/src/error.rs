use crate::elliptic::SolveReport;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("grid needs at least 3 nodes per axis, got {nx}x{ny}")]
    GridTooSmall { nx: usize, ny: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("field or trace does not belong to this grid")]
    GridMismatch,

    #[error("operator is not positive definite (smallest eigenvalue estimate {0:.6e})")]
    Indefinite(f64),

    #[error(
        "conjugate gradient stopped after {iterations} iterations with residual {residual:.3e}"
    )]
    LinearSolve { iterations: usize, residual: f64 },

    #[error("eigenvalue iteration did not settle after {iterations} iterations")]
    Eigenvalue { iterations: usize },

    #[error("semilinear solve did not converge after {} iterations (last residual {:.3e})", .0.iterations, .0.final_residual())]
    NotConverged(Box<SolveReport>),

    #[error("quadrature missed tolerance: estimate {estimate}, error bound {error:.3e}")]
    Quadrature { estimate: f64, error: f64 },

    #[error("bisection bracket failure: {0}")]
    Bracket(String),
}

pub type Result<T> = std::result::Result<T, Error>;
