use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parity mismatch: cannot reach height {target} in {steps} steps from 0")]
    Parity { steps: usize, target: i64 },
    #[error("size {n} exceeds the enumeration limit {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("malformed walk: {0}")]
    Walk(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("window too small: {0}")]
    Window(String),
    #[error("solver did not converge after {iters} iterations (residual {residual:e})")]
    NoConvergence { iters: usize, residual: f64 },
    #[error("verification failed: {0}")]
    Falsified(String),
}

pub type Result<T> = std::result::Result<T, Error>;
