use thiserror::Error;

/// Errors raised by the closed forms, the numerical oracle and the
/// entanglement measures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("closed forms require a degenerate qubit (omega0 = 0), got omega0 = {0}")]
    NonDegenerate(f64),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("state is not X-shaped: largest off-X entry has modulus {0:e}")]
    NotXState(f64),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("truncation failure at ncut = {ncut}: {reason}")]
    Truncation { ncut: usize, reason: String },

    #[error("eigensolver did not converge for a {dim}x{dim} block (max |H_ij| = {max_abs:e})")]
    Eigensolver { dim: usize, max_abs: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
