use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Parts of the z-plane used to describe where the Stark determinant may
/// vanish.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RegionTag {
    /// The sector between the rays `arg z = 0` and `arg z = -2 pi/3`, away
    /// from both.
    R1,
    /// Everything from just below the ray `-2 pi/3` round to the positive
    /// axis approached from above.
    R2,
    /// The sector `0 < arg z < 4 pi/3` shrunk away from its edges.
    R2Tilde,
    NearRay0,
    NearRayTwoThirds,
    OriginDisk,
}

/// Strip constant `m` (`> 20`) and origin exponent `a` (`0 < a < 1/2`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionParams {
    pub f: f64,
    pub m: f64,
    pub a: f64,
}

impl RegionParams {
    pub fn new(f: f64, m: f64, a: f64) -> Result<Self> {
        if !(f > 0.0 && f.is_finite()) {
            return Err(Error::InvalidModel(format!("field strength must be positive, got {f}")));
        }
        if !(m > 20.0) {
            return Err(Error::InvalidModel(format!("strip constant must exceed 20, got {m}")));
        }
        if !(a > 0.0 && a < 0.5) {
            return Err(Error::InvalidModel(format!("origin exponent must lie in (0, 1/2), got {a}")));
        }
        Ok(Self { f, m, a })
    }

    /// `m = 20.0001`, `a = 0.4`.
    pub fn with_defaults(f: f64) -> Result<Self> {
        Self::new(f, 20.0001, 0.4)
    }

    fn log_term(&self, r: f64) -> f64 {
        self.m * self.f * (r + 1.0 / self.f).ln()
    }

    /// Angular half-width of the strip about the ray `arg z = 0`.
    pub fn width_ray0(&self, r: f64) -> f64 {
        r.powf(-1.5) * self.log_term(r)
    }

    /// Angular half-width of the strip about the ray `arg z = -2 pi/3`.
    pub fn width_ray_two_thirds(&self, r: f64) -> f64 {
        (1.0 + r.powf(-0.5)) / r * self.log_term(r)
    }

    pub fn origin_radius(&self) -> f64 {
        self.f.powf(self.a)
    }

    /// Membership in the shrunk upper sector, with `arg z` taken in
    /// `(-2 pi/3, 4 pi/3]`.
    pub fn in_r2_tilde(&self, z: Complex64) -> bool {
        let r = z.norm();
        if r <= self.origin_radius() {
            return false;
        }
        let mut theta = z.arg();
        if theta <= -2.0 * PI / 3.0 {
            theta += 2.0 * PI;
        }
        theta > self.width_ray0(r) && theta < 4.0 * PI / 3.0 - self.width_ray_two_thirds(r)
    }
}

/// Tags `z` with `arg z` taken in `(-2 pi, 0]`. Every point gets exactly one
/// of `OriginDisk`, `NearRay0`, `R1`, `NearRayTwoThirds`, `R2`.
pub fn region_classify(z: Complex64, params: &RegionParams) -> RegionTag {
    let r = z.norm();
    if r <= params.origin_radius() {
        return RegionTag::OriginDisk;
    }
    let mut theta = z.arg();
    if theta > 0.0 {
        theta -= 2.0 * PI;
    }
    let w0 = params.width_ray0(r);
    let w23 = params.width_ray_two_thirds(r);
    if theta >= -w0 {
        RegionTag::NearRay0
    } else if theta > -2.0 * PI / 3.0 + w0 {
        RegionTag::R1
    } else if theta >= -2.0 * PI / 3.0 - w23 {
        RegionTag::NearRayTwoThirds
    } else {
        RegionTag::R2
    }
}

/// Whether `z` lies in the set that may contain resonances for small `f`:
/// one of the two ray strips outside `|z| = f^(beta/2)`, or the annulus
/// `f^(2/(3 beta)) <= |z| <= f^(beta/2)`.
pub fn in_resonance_strips(z: Complex64, f: f64, m: f64, beta: f64) -> bool {
    let r = z.norm();
    let outer = f.powf(beta / 2.0);
    if r <= outer {
        return r >= f.powf(2.0 / (3.0 * beta));
    }
    let log_term = m * f * (1.0 / f + r).ln();
    let theta = z.arg();
    theta.abs() < r.powf(-1.5) * log_term || (theta + 2.0 * PI / 3.0).abs() < (1.0 + r.powf(-0.5)) / r * log_term
}
