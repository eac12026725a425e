//! Numerical building blocks shared by the other modules.

mod branch;
mod ext;
mod phase;
mod quad;

pub use branch::BranchedSqrt;
pub use ext::ExtendedComplex;
pub use phase::{PhaseSample, PhaseTrace};
pub use quad::{adaptive_quadrature, gauss_legendre, integrate, QuadResult, Tolerance};
