use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::determinants::{DeterminantValue, ModelSpec, Plane};
use crate::error::{Error, Result};
use crate::numerics::ExtendedComplex;
use crate::rootfinder::Analytic;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// `g_b(w) = sin w + b w cos w`.
pub fn g_b(b: f64, w: Complex64) -> ExtendedComplex {
    if w.norm() <= 10.0 {
        return (w.sin() + w * w.cos() * b).into();
    }
    let half_bw = w * (0.5 * b);
    let up = ExtendedComplex::exp(I * w) * (half_bw - I * 0.5);
    let down = ExtendedComplex::exp(-I * w) * (half_bw + I * 0.5);
    up + down
}

/// `h_0(w) = (2 eta w + i)^2 + exp(4 i kappa w)`.
pub fn free_numerator(w: Complex64, spec: &ModelSpec) -> ExtendedComplex {
    let lead = 2.0 * spec.eta * w + I;
    ExtendedComplex::from(lead * lead) + ExtendedComplex::exp(I * (4.0 * spec.kappa) * w)
}

/// Free-model determinant `h_0(w) / (4 eta^2 w^2)` as a function of
/// `w = sqrt z`. The wall and field, if any, are ignored.
pub fn det_free(w: Complex64, spec: &ModelSpec) -> Result<DeterminantValue> {
    if w.re == 0.0 && w.im == 0.0 {
        return Err(Error::Pole);
    }
    let denom = 4.0 * spec.eta * spec.eta * w * w;
    Ok(DeterminantValue {
        value: free_numerator(w, spec).scale_by(denom.inv()),
        plane: Plane::W,
        region_tag: None,
        trunc_error: 0.0,
    })
}

/// `F_(+/-)(s, t; w) = 1 + i (1 +/- exp(i t w)) / (s w)`.
pub fn f_factor(sign: Sign, s: f64, t: f64, w: Complex64) -> Result<Complex64> {
    if w.re == 0.0 && w.im == 0.0 {
        return match sign {
            Sign::Minus => Ok(Complex64::new(1.0 + t / s, 0.0)),
            Sign::Plus => Err(Error::Pole),
        };
    }
    let e = (I * t * w).exp();
    Ok(1.0 + I * (1.0 + sign.value() * e) / (s * w))
}

/// [`det_free`] packaged for the root finder (w-plane).
#[derive(Clone, Copy, Debug)]
pub struct FreeDeterminant {
    pub spec: ModelSpec,
}

impl Analytic for FreeDeterminant {
    fn eval(&self, w: Complex64) -> ExtendedComplex {
        match det_free(w, &self.spec) {
            Ok(v) => v.value,
            Err(_) => ExtendedComplex::new(Complex64::new(f64::NAN, f64::NAN), 0),
        }
    }
}
