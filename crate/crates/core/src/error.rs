use thiserror::Error;

/// Errors raised by the kernel, the channel constructors and the measures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not Hermitian (max deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("invalid channel representation: {0}")]
    Representation(String),
    #[error("invalid thermal populations: {0}")]
    InvalidGibbs(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("relative entropy diverges: {0}")]
    Divergence(String),
    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    Convergence { iterations: usize, residual: f64 },
    #[error("sdp solver: {0}")]
    Solver(String),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
