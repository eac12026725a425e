use num_complex::Complex64;
use thiserror::Error;

use crate::rootfinder::Resonance;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(&'static str),

    #[error("invalid model parameters: {0}")]
    InvalidModel(String),

    #[error("pole of the determinant at w = 0")]
    Pole,

    #[error("quadrature did not converge: estimate {estimate}, error bound {error_bound:e}")]
    Quadrature { estimate: Complex64, error_bound: f64 },

    #[error("phase could not be resolved near parameter {at} on the contour")]
    UnresolvedPhase { at: f64 },

    #[error("zero on or near the contour close to {point}")]
    BoundaryZero { point: Complex64 },

    #[error("subdivision depth exceeded after {} resonances", partial.len())]
    DepthExceeded { partial: Vec<Resonance> },

    #[error("no admissible radius found: {0}")]
    NoSafeRadius(String),

    #[error("no sign change on the bracket for index {index}")]
    NoBracket { index: usize },

    #[error("iteration did not converge: {0}")]
    NoConvergence(&'static str),
}
