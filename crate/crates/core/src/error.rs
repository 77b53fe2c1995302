use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("grid error: {0}")]
    Grid(String),
    #[error("rescale pushes support outside the grid (tail fraction {tail:.3e})")]
    RescaleOutOfDomain { tail: f64 },
    #[error("no convergence within {iters} iterations (last change {last:.3e})")]
    NonConvergence { iters: usize, last: f64 },
    #[error("iterate collapsed toward the zero field")]
    ZeroCollapse,
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
