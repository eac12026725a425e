//! Perturbation determinants whose zeros are the resonances.
//!
//! * Free model: two delta barriers at `x = -kappa, kappa`, a function of
//!   `w = sqrt z` ([`det_free`]).
//! * Stark model: the same barriers in a field `f`, entire in `z`
//!   ([`det_stark`]).
//! * Dirichlet model: the barriers with a hard wall at `x = l`, a function of
//!   `w` ([`det_dirichlet`]).
//!
//! Values that can overflow are carried as
//! [`ExtendedComplex`](crate::numerics::ExtendedComplex).

mod approx;
mod dirichlet;
mod free;
mod model;
mod region;
mod stark;

pub use approx::{det_stark_approx, det_stark_approx_in, Approximant, ApproximantValue};
pub use dirichlet::{
    det_dirichlet, det_dirichlet_direct, dirichlet_limit_at_zero, dirichlet_split, in_dirichlet_zero_set, DirichletDeterminant,
};
pub use free::{det_free, f_factor, free_numerator, g_b, FreeDeterminant, Sign};
pub use model::{DeterminantValue, ModelSpec, Plane, Variant};
pub use region::{in_resonance_strips, region_classify, RegionParams, RegionTag};
pub use stark::{
    det_origin_expansion, det_stark, origin_coefficients, stark_aux, stark_solutions, wronskian_at, AuxSymbols,
    OriginCoefficients, StarkDeterminant,
};


use num_complex::Complex64;

use crate::error::Result;
use crate::numerics::ExtendedComplex;
use crate::rootfinder::Analytic;

/// The determinant of any model, evaluated in that model's own plane
/// (see [`ModelSpec::plane`]).
pub fn determinant(p: Complex64, spec: &ModelSpec) -> Result<DeterminantValue> {
    match spec.variant {
        Variant::Free => det_free(p, spec),
        Variant::Stark { .. } => det_stark(p, spec),
        Variant::Dirichlet { .. } => det_dirichlet(p, spec),
    }
}

/// [`determinant`] packaged for the root finder. Points where the
/// determinant is undefined evaluate to NaN.
#[derive(Clone, Copy, Debug)]
pub struct ModelDeterminant {
    spec: ModelSpec,
}

impl ModelDeterminant {
    pub fn new(spec: ModelSpec) -> Result<Self> {
        Ok(Self { spec: spec.validated()? })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }
}

impl Analytic for ModelDeterminant {
    fn eval(&self, p: Complex64) -> ExtendedComplex {
        determinant(p, &self.spec)
            .map(|v| v.value)
            .unwrap_or_else(|_| ExtendedComplex::new(Complex64::new(f64::NAN, f64::NAN), 0))
    }
}
