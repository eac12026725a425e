//! Square roots with an explicit choice of argument window.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Square root whose argument representative is taken in the half-open window
/// `(lower, lower + 2 pi]`.
///
/// Different approximants of the Stark determinant are valid on sectors that
/// straddle the negative or positive real axis, so each one carries its own
/// window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchedSqrt {
    lower: f64,
}

impl Default for BranchedSqrt {
    /// Window `(-2 pi, 0]`.
    fn default() -> Self {
        Self { lower: -2.0 * PI }
    }
}

impl BranchedSqrt {
    /// Window `(lower, lower + 2 pi]`.
    pub fn new(lower: f64) -> Self {
        Self { lower }
    }

    pub fn principal() -> Self {
        Self { lower: -PI }
    }

    pub fn window(&self) -> (f64, f64) {
        (self.lower, self.lower + 2.0 * PI)
    }

    /// Representative of `arg z` in the window.
    pub fn arg(&self, z: Complex64) -> f64 {
        let upper = self.lower + 2.0 * PI;
        let mut t = z.im.atan2(z.re);
        while t > upper {
            t -= 2.0 * PI;
        }
        while t <= self.lower {
            t += 2.0 * PI;
        }
        t
    }

    /// Returns the root and whether `z` sits on the branch point.
    pub fn sqrt(&self, z: Complex64) -> (Complex64, bool) {
        if z.re == 0.0 && z.im == 0.0 {
            return (Complex64::new(0.0, 0.0), true);
        }
        (Complex64::from_polar(z.norm().sqrt(), 0.5 * self.arg(z)), false)
    }

    /// `z^p` for real `p` with the same argument representative.
    pub fn pow(&self, z: Complex64, p: f64) -> Complex64 {
        if z.re == 0.0 && z.im == 0.0 {
            return z;
        }
        Complex64::from_polar(z.norm().powf(p), p * self.arg(z))
    }

    /// The root alone.
    pub fn root(&self, z: Complex64) -> Complex64 {
        self.sqrt(z).0
    }
}
