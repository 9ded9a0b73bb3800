use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("point x = {x} lies left of the domain start x_L = {x_l}")]
    Domain { x: f64, x_l: f64 },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("tridiagonal eigensolver did not converge (order {order})")]
    EigenNoConvergence { order: usize },
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
    #[error("operation not supported for this basis: {0}")]
    Unsupported(&'static str),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("solver aborted at t = {t}: {reason}")]
    Aborted { t: f64, reason: String },
}

pub type Result<T> = std::result::Result<T, SpectralError>;
