use num_complex::Complex64;
use thiserror::Error;

/// Errors shared by every module. Input problems and computational
/// singularities are kept apart so callers can map them to exit codes.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("signature is not hyperbolic: 2g-2+Σ(1-1/ν)+τ = {0} ≤ 0")]
    NonHyperbolic(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("weight k = {0} is not admissible for this compact signature")]
    NotAdmissible(String),
    #[error("pole at s = {0}")]
    PoleAt(Complex64),
    #[error("zero of Barnes G at s = {0}")]
    ZeroOfBarnesG(Complex64),
    #[error("argument {0} outside the domain: {1}")]
    Domain(Complex64, String),
    #[error("L(1, χ) has a pole for the trivial character")]
    PoleAtOne,
    #[error("scattering determinant φ is required (τ₀ > 0) but was not supplied")]
    MissingPhi,
}

impl Error {
    /// True for errors caused by malformed input rather than by hitting a
    /// singularity during evaluation.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::NonHyperbolic(_)
                | Error::DimensionMismatch(_)
                | Error::InvalidInput(_)
                | Error::NotAdmissible(_)
                | Error::MissingPhi
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
