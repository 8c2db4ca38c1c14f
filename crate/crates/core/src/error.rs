use thiserror::Error;

/// Errors raised by the solvers, the reduction and the configuration layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("nearest rotation is not unique at this deformation gradient (sigma2 + sigma3 = {0:e})")]
    SingularPoint(f64),

    #[error("orientation error: det F = {0:e} is not positive")]
    Orientation(f64),

    #[error("reduction error: {0}")]
    Reduction(String),

    #[error("linear solver did not converge after {iterations} iterations (residual {residual:e})")]
    Solver { iterations: usize, residual: f64 },

    #[error("blow-up at t = {time}: {reason}")]
    BlowUp { time: f64, reason: String },

    #[error("slope fit error: {0}")]
    Fit(String),

    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
