//! Resonance determinants for one-dimensional delta-shell potentials, with and
//! without a weak linear (Stark) field.
//!
//! The crate is organised bottom-up:
//!
//! * [`numerics`]: extended-range complex numbers, branch-cut square roots,
//!   phase tracking along contours and adaptive quadrature.
//! * [`airy`]: the Airy function `Ai` over the whole complex plane.
//! * [`determinants`]: the free, Stark and Dirichlet perturbation determinants
//!   together with their large-argument approximants.
//! * [`rootfinder`]: argument-principle counting and zero isolation.
//! * [`shape`]: shape resonances of the field-free model.
//! * [`counting`]: Jensen and Carleman integrals and census helpers.
//! * [`dynamics`]: Green's kernels, spectral densities and survival amplitudes.

pub mod airy;
pub mod counting;
pub mod determinants;
pub mod dynamics;
pub mod error;
pub mod numerics;
pub mod rootfinder;
pub mod shape;

pub use error::{Error, Result};
pub use num_complex::Complex64;
