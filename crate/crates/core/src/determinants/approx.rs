use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::determinants::{free_numerator, g_b, ModelSpec};
use crate::error::{Error, Result};
use crate::numerics::{BranchedSqrt, ExtendedComplex};

const I: Complex64 = Complex64::new(0.0, 1.0);
/// First asymptotic Airy coefficient, `Gamma(7/2) / (54 Gamma(3/2))`.
const C1: f64 = 5.0 / 72.0;

/// Large-`|z|` approximations of the Stark determinant, each valid in its
/// own sector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Approximant {
    /// `|arg z| < 2 pi/3`.
    East,
    /// `0 < arg z < 4 pi/3`.
    North,
    /// `-4 pi/3 < arg z < 0`.
    South,
    /// Leading term between the two rays in the lower half plane.
    F1,
    /// Leading term in the upper sector; same formula as `North`.
    F2,
}

impl Approximant {
    /// Argument window of `sqrt z` that matches the sector.
    pub fn default_window(self) -> BranchedSqrt {
        match self {
            Approximant::East => BranchedSqrt::principal(),
            Approximant::North | Approximant::F2 => BranchedSqrt::new(-2.0 * PI / 3.0),
            Approximant::South | Approximant::F1 => BranchedSqrt::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ApproximantValue {
    pub value: ExtendedComplex,
    /// Log of the error envelope for this approximant (constants omitted).
    pub log_envelope: f64,
    pub window: BranchedSqrt,
}

fn ext_sin(w: Complex64) -> ExtendedComplex {
    if w.im.abs() < 300.0 {
        return w.sin().into();
    }
    (ExtendedComplex::exp(I * w) - ExtendedComplex::exp(-I * w)) * Complex64::new(0.0, -0.5)
}

/// `ln(1 + e^x)` without overflow.
fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

pub fn det_stark_approx(z: Complex64, spec: &ModelSpec, which: Approximant) -> Result<ApproximantValue> {
    det_stark_approx_in(z, spec, which, which.default_window())
}

/// As [`det_stark_approx`] with an explicit `sqrt z` window.
pub fn det_stark_approx_in(
    z: Complex64,
    spec: &ModelSpec,
    which: Approximant,
    window: BranchedSqrt,
) -> Result<ApproximantValue> {
    let f = spec
        .field()
        .ok_or_else(|| Error::InvalidModel("approximants need a field strength".into()))?;
    let (s, at_origin) = window.sqrt(z);
    if at_origin {
        return Err(Error::Pole);
    }
    let (kappa, eta) = (spec.kappa, spec.eta);
    let r = z.norm();
    let s3 = z * s;
    let phase = I * 4.0 * s3 / (3.0 * f) + I * f * kappa * kappa / (2.0 * s);
    let e = ExtendedComplex::exp(phase);
    let g = g_b(eta / kappa, 2.0 * kappa * s);
    let quarter = (4.0 * z * eta * eta).inv();

    let log_e1 = 2.0 * f.ln() - 2.0 * r.ln() + phase.re + 2.0 * kappa * s.im.abs() + (r.powi(-2)).ln_1p();
    let log_e2_base = 2.0 * f.ln() - 2.5 * r.ln() + r.powf(-1.5).ln_1p();
    let log_e2 = log_e2_base + softplus(-4.0 * kappa * s.im);
    let log_e2p = log_e2_base + softplus(4.0 * kappa * s.im);
    let log_sum = |a: f64, b: f64| a.max(b) + softplus(-(a - b).abs());

    let first_order = || {
        let bracket = g.scale_by(3.0 * C1 / z) + ext_sin(2.0 * kappa * s) * (kappa * eta);
        (e * bracket).scale_by(-I / (2.0 * s3 * eta * eta))
    };

    let (value, log_envelope) = match which {
        Approximant::East => {
            let v = (free_numerator(s, spec) + e * g * 2.0).scale_by(quarter) + first_order() * f;
            (v, log_sum(log_e1, log_e2))
        }
        Approximant::South => {
            let v = (free_numerator(-s, spec) + e * g * 2.0).scale_by(quarter) + first_order() * f;
            (v, log_sum(log_e1, log_e2p))
        }
        Approximant::North | Approximant::F2 => (free_numerator(s, spec).scale_by(quarter), log_e2),
        Approximant::F1 => ((g * e).scale_by((2.0 * z * eta * eta).inv()), log_sum(log_e1, log_e2)),
    };
    Ok(ApproximantValue { value, log_envelope, window })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::determinants::{det_stark, region_classify, RegionParams, RegionTag};

    fn spec(f: f64) -> ModelSpec {
        ModelSpec::stark(1.0, 1.0, f).unwrap()
    }

    #[test]
    fn tilde_numerator_is_reflected_numerator() {
        let sp = spec(1e-2);
        let window = BranchedSqrt::new(-4.0 * PI / 3.0);
        for theta in [-1.0, -2.0, -3.5, 0.5] {
            let z = Complex64::from_polar(1.7, theta);
            let s = window.root(z);
            let a = free_numerator(-s, &sp).to_complex();
            let b = (2.0 * s - I).powi(2) + (-4.0 * I * s).exp();
            assert!((a - b).norm() < 1e-12 * b.norm());
        }
    }

    #[test]
    fn leading_term_in_lower_sector() {
        let f = 1e-3;
        let sp = spec(f);
        let params = RegionParams::with_defaults(f).unwrap();
        let mut worst: f64 = 0.0;
        let mut count = 0;
        for i in 0..10 {
            for j in 0..10 {
                let r = 0.5 + 0.25 * i as f64;
                let theta = -2.0 * PI / 3.0 * (0.05 + 0.9 * j as f64 / 9.0);
                let z = Complex64::from_polar(r, theta);
                if region_classify(z, &params) != RegionTag::R1 {
                    continue;
                }
                count += 1;
                let d = det_stark(z, &sp).unwrap().value;
                let a = det_stark_approx(z, &sp, Approximant::F1).unwrap().value;
                let c = (d.ratio(&a) - 1.0).norm() * (r + 1.0 / f).ln();
                worst = worst.max(c);
            }
        }
        assert!(count > 80);
        assert!(worst < 1.0, "empirical constant {worst}");
    }

    #[test]
    fn leading_term_in_upper_sector() {
        let f = 1e-3;
        let sp = spec(f);
        let params = RegionParams::with_defaults(f).unwrap();
        let mut worst: f64 = 0.0;
        let mut count = 0;
        for i in 0..10 {
            for j in 0..10 {
                let r = 0.5 + 0.25 * i as f64;
                let theta = 0.05 + (4.0 * PI / 3.0 - 0.1) * j as f64 / 9.0;
                let z = Complex64::from_polar(r, theta);
                if !params.in_r2_tilde(z) {
                    continue;
                }
                count += 1;
                let d = det_stark(z, &sp).unwrap().value.to_complex();
                let a = det_stark_approx(z, &sp, Approximant::F2).unwrap().value.to_complex();
                let envelope = f * f * r.powf(-2.5) * (1.0 + r.powf(-1.5));
                worst = worst.max((d - a).norm() / envelope);
            }
        }
        assert!(count > 70);
        assert!(worst < 100.0, "empirical constant {worst}");
    }

    #[test]
    fn east_and_south_track_the_determinant() {
        let f = 1e-3;
        let sp = spec(f);
        for (z, which) in [
            (Complex64::from_polar(1.3, -0.7), Approximant::East),
            (Complex64::from_polar(1.3, -1.5), Approximant::South),
            (Complex64::from_polar(1.3, -3.0), Approximant::South),
            (Complex64::from_polar(1.3, 1.0), Approximant::North),
        ] {
            let d = det_stark(z, &sp).unwrap().value;
            let a = det_stark_approx(z, &sp, which).unwrap();
            let err = (d - a.value).log_abs();
            assert!(err < a.log_envelope + 5.0, "{which:?} at {z}: {err} vs {}", a.log_envelope);
        }
    }

    #[test]
    fn origin_is_a_pole() {
        assert!(det_stark_approx(Complex64::new(0.0, 0.0), &spec(0.1), Approximant::F2).is_err());
    }
}
