use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not converge: estimated error {estimate:e} above tolerance {tolerance:e}")]
    Convergence { estimate: f64, tolerance: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("step size underflow at t = {t}: dt = {dt:e}")]
    Stiffness { t: f64, dt: f64 },

    #[error("particles {i} and {j} collided at t = {t} (separation {separation:e})")]
    Collision { t: f64, i: usize, j: usize, separation: f64 },

    #[error("trajectory time grids are not aligned: {0}")]
    Alignment(String),

    #[error("excluded momentum transfer q = 0")]
    ExcludedTransfer,

    #[error("basis dimension exceeds cap {cap}")]
    Capacity { cap: usize },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    Solver { iterations: usize, residual: f64 },

    #[error("state vector is not normalized (norm {norm})")]
    Normalization { norm: f64 },
}
