use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::determinants::RegionTag;
use crate::error::{Error, Result};
use crate::numerics::ExtendedComplex;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Variant {
    Free,
    /// Linear field of strength `f`.
    Stark { f: f64 },
    /// Hard wall at `x = l`.
    Dirichlet { l: f64 },
}

/// Parameters of the two-barrier Hamiltonian: barriers of strength `1/eta`
/// at `x = -kappa` and `x = kappa`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kappa: f64,
    pub eta: f64,
    pub variant: Variant,
}

impl ModelSpec {
    pub fn free(kappa: f64, eta: f64) -> Result<Self> {
        Self { kappa, eta, variant: Variant::Free }.validated()
    }

    pub fn stark(kappa: f64, eta: f64, f: f64) -> Result<Self> {
        Self { kappa, eta, variant: Variant::Stark { f } }.validated()
    }

    pub fn dirichlet(kappa: f64, eta: f64, l: f64) -> Result<Self> {
        Self { kappa, eta, variant: Variant::Dirichlet { l } }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(self.kappa) {
            return Err(Error::InvalidModel(format!("kappa must be positive, got {}", self.kappa)));
        }
        if !positive(self.eta) {
            return Err(Error::InvalidModel(format!("eta must be positive, got {}", self.eta)));
        }
        match self.variant {
            Variant::Free => {}
            Variant::Stark { f } if !positive(f) => {
                return Err(Error::InvalidModel(format!("field strength must be positive, got {f}")));
            }
            Variant::Dirichlet { l } if !(l.is_finite() && l > self.kappa) => {
                return Err(Error::InvalidModel(format!("wall position {l} must exceed kappa {}", self.kappa)));
            }
            _ => {}
        }
        Ok(self)
    }

    /// Same barriers without field or wall.
    pub fn without_field(&self) -> Self {
        Self { variant: Variant::Free, ..*self }
    }

    pub fn field(&self) -> Option<f64> {
        match self.variant {
            Variant::Stark { f } => Some(f),
            _ => None,
        }
    }

    pub fn wall(&self) -> Option<f64> {
        match self.variant {
            Variant::Dirichlet { l } => Some(l),
            _ => None,
        }
    }

    /// The plane in which this model's determinant is single valued.
    pub fn plane(&self) -> Plane {
        match self.variant {
            Variant::Stark { .. } => Plane::Z,
            _ => Plane::W,
        }
    }
}

/// `Z` is the energy plane, `W` the plane of `w = sqrt z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Plane {
    Z,
    W,
}

impl Plane {
    /// Energy corresponding to a point of this plane.
    pub fn to_energy(self, p: Complex64) -> Complex64 {
        match self {
            Plane::Z => p,
            Plane::W => p * p,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeterminantValue {
    pub value: ExtendedComplex,
    pub plane: Plane,
    pub region_tag: Option<RegionTag>,
    pub trunc_error: f64,
}
