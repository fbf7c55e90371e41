use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    #[error("invalid basis index (l={l}, n={n}, mu={mu})")]
    InvalidIndex { l: i64, n: i64, mu: i8 },

    #[error("representation mismatch: {0}")]
    Mismatch(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("diffusivity is not positive definite at (r={r}, phi={phi}): smallest eigenvalue {lambda}")]
    NotSpd { r: f64, phi: f64, lambda: f64 },

    #[error("diffusivity violates the well-posedness ratio: lambda_max/lambda_min = {ratio} >= {limit}")]
    NotWellPosed { ratio: f64, limit: f64 },

    #[error("insufficient modes: {0}")]
    InsufficientModes(String),

    #[error("linear system is singular or ill-conditioned (condition estimate {condition:e}, relative residual {residual:e})")]
    IllConditioned { condition: f64, residual: f64 },

    #[error("iterative solver did not converge after {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("parse error at line {line}: {detail}")]
    Parse { line: usize, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain { func, detail: detail.into() }
}
