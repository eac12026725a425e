use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::airy::{airy, omega, AirySample, AI0};
use crate::determinants::{DeterminantValue, ModelSpec, Plane};
use crate::error::{Error, Result};
use crate::numerics::ExtendedComplex;
use crate::rootfinder::Analytic;

fn field_of(spec: &ModelSpec) -> Result<f64> {
    spec.field()
        .ok_or_else(|| Error::InvalidModel("the Stark determinant needs a field strength".into()))
}

/// `f^(1/3) e^(-i pi/6) / (2 pi)`.
fn wronskian(f: f64) -> Complex64 {
    Complex64::from_polar(f.cbrt() / (2.0 * PI), -PI / 6.0)
}

/// The four barrier products and their ingredients at one energy.
///
/// `phi` decays as `x -> +inf`, `psi` is outgoing as `x -> -inf`; the
/// suffix names the barrier (`plus` at `x = kappa`).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AuxSymbols {
    /// `psi(kappa) phi(kappa)`
    pub alpha_plus: ExtendedComplex,
    /// `psi(-kappa) phi(-kappa)`
    pub alpha_minus: ExtendedComplex,
    /// `psi(-kappa) phi(kappa)`
    pub beta_plus: ExtendedComplex,
    /// `psi(kappa) phi(-kappa)`
    pub beta_minus: ExtendedComplex,
    pub wronskian: Complex64,
    /// `z - kappa f`
    pub z_theta_plus: Complex64,
    /// `z + kappa f`
    pub z_theta_minus: Complex64,
    /// `S(kappa)` for the solution with `S(-kappa) = 0`, `S'(-kappa) = 1`, so
    /// that `beta_minus - beta_plus = W S(kappa)` without cancellation.
    pub transfer: Complex64,
    /// Largest Airy truncation estimate among the four samples.
    pub trunc_error: f64,
}

/// Airy arguments: `phi(x) = Ai((f x - z)/f^(2/3))`, `psi(x) = Ai(w (f x - z)/f^(2/3))`.
fn solution_samples(f: f64, z: Complex64, x: f64) -> (AirySample, AirySample) {
    let c = f.powf(2.0 / 3.0);
    let arg = (f * x - z) / c;
    (airy(omega() * arg), airy(arg))
}

/// Integrates `y'' = (f x - z) y` from `x0` to `x1` by local Taylor series.
fn propagate(f: f64, z: Complex64, x0: f64, x1: f64, mut y: Complex64, mut dy: Complex64) -> (Complex64, Complex64) {
    let reach = (z.norm() + f * x0.abs().max(x1.abs())).sqrt().max(1.0);
    let steps = ((x1 - x0).abs() * reach / 0.5).ceil().max(1.0) as usize;
    let h = (x1 - x0) / steps as f64;
    for i in 0..steps {
        let a = f * (x0 + h * i as f64) - z;
        let mut c = [y, dy * h, Complex64::new(0.0, 0.0)];
        let (mut sum, mut dsum) = (c[0] + c[1], c[1]);
        let h2 = h * h;
        let mut quiet = 0;
        for k in 0..80 {
            // c[2] is the coefficient of t^(k+2) scaled by h^(k+2); c[0], c[1] hold k, k+1
            let prev = if k == 0 { Complex64::new(0.0, 0.0) } else { c[2] };
            let next = (a * c[0] * h2 + prev * (f * h2 * h)) / ((k + 2) as f64 * (k + 1) as f64);
            c = [c[1], next, c[0]];
            sum += next;
            dsum += next * (k + 2) as f64;
            // one chain of coefficients can vanish identically, so wait for three small terms
            if next.norm() <= 1e-18 * sum.norm().max(dsum.norm()) {
                quiet += 1;
                if quiet == 3 {
                    break;
                }
            } else {
                quiet = 0;
            }
        }
        y = sum;
        dy = dsum / h;
    }
    (y, dy)
}

pub fn stark_aux(z: Complex64, spec: &ModelSpec) -> Result<AuxSymbols> {
    let f = field_of(spec)?;
    let (psi_p, phi_p) = solution_samples(f, z, spec.kappa);
    let (psi_m, phi_m) = solution_samples(f, z, -spec.kappa);
    let trunc_error = [psi_p, phi_p, psi_m, phi_m].iter().map(|s| s.trunc_error).fold(0.0, f64::max);
    Ok(AuxSymbols {
        alpha_plus: psi_p.value * phi_p.value,
        alpha_minus: psi_m.value * phi_m.value,
        beta_plus: psi_m.value * phi_p.value,
        beta_minus: psi_p.value * phi_m.value,
        wronskian: wronskian(f),
        z_theta_plus: z - spec.kappa * f,
        z_theta_minus: z + spec.kappa * f,
        transfer: propagate(f, z, -spec.kappa, spec.kappa, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)).0,
        trunc_error,
    })
}

/// `D_f(z) = 1 + (a+ + a-)/(eta W) + b+ (b- - b+)/(eta W)^2`, entire in `z`.
///
/// `b- - b+` is taken from the transfer solution between the barriers: the
/// two products are each of size `exp(4 |Im z^(3/2)| / 3f)` and cancel.
pub fn det_stark(z: Complex64, spec: &ModelSpec) -> Result<DeterminantValue> {
    let aux = stark_aux(z, spec)?;
    let ew = (spec.eta * aux.wronskian).inv();
    let first = (aux.alpha_plus + aux.alpha_minus) * ew;
    let second = aux.beta_plus.scale_by(aux.transfer * ew / spec.eta);
    Ok(DeterminantValue {
        value: ExtendedComplex::from(1.0) + first + second,
        plane: Plane::Z,
        region_tag: None,
        trunc_error: aux.trunc_error,
    })
}

/// `(psi, psi', phi, phi')` at position `x`, derivatives in `x`.
pub fn stark_solutions(
    spec: &ModelSpec,
    z: Complex64,
    x: f64,
) -> Result<(ExtendedComplex, ExtendedComplex, ExtendedComplex, ExtendedComplex)> {
    let f = field_of(spec)?;
    let (psi, phi) = solution_samples(f, z, x);
    let k = f.cbrt();
    Ok((psi.value, psi.derivative * (omega() * k), phi.value, phi.derivative * k))
}

/// `psi' phi - phi' psi` at `x`; independent of `x` and equal to the
/// constant used by [`det_stark`].
pub fn wronskian_at(spec: &ModelSpec, z: Complex64, x: f64) -> Result<Complex64> {
    let (psi, dpsi, phi, dphi) = stark_solutions(spec, z, x)?;
    Ok((dpsi * phi - dphi * psi).to_complex())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OriginCoefficients {
    pub c1: Complex64,
    pub c2: Complex64,
    pub c3: f64,
}

pub fn origin_coefficients(spec: &ModelSpec) -> OriginCoefficients {
    let (k, e) = (spec.kappa, spec.eta);
    OriginCoefficients {
        c1: Complex64::from_polar(4.0 * PI * AI0 * AI0 * (e + k) / (e * e), PI / 6.0),
        c2: Complex64::new(0.0, 2.0 / 3f64.sqrt() * (k + e) / (e * e)),
        c3: 1.0 - 2.0 * (k / e).powi(2),
    }
}

/// `f^(-1/3) (c1 + c2 z f^(-2/3)) + c3`, valid for `|z| << f^(2/3)`.
pub fn det_origin_expansion(z: Complex64, spec: &ModelSpec) -> Result<Complex64> {
    let f = field_of(spec)?;
    let c = origin_coefficients(spec);
    Ok((c.c1 + c.c2 * z / f.powf(2.0 / 3.0)) / f.cbrt() + c.c3)
}

/// [`det_stark`] packaged for the root finder (z-plane).
#[derive(Clone, Copy, Debug)]
pub struct StarkDeterminant {
    spec: ModelSpec,
}

impl StarkDeterminant {
    pub fn new(spec: ModelSpec) -> Result<Self> {
        field_of(&spec)?;
        Ok(Self { spec })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }
}

impl Analytic for StarkDeterminant {
    fn eval(&self, z: Complex64) -> ExtendedComplex {
        det_stark(z, &self.spec).expect("spec checked at construction").value
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(f: f64) -> ModelSpec {
        ModelSpec::stark(1.0, 1.0, f).unwrap()
    }

    #[test]
    fn product_identity() {
        for f in [0.5, 0.05, 0.01, 1e-3] {
            for z in [Complex64::new(1.0, -0.3), Complex64::new(-2.0, 0.5), Complex64::new(0.3, 1.7)] {
                let a = stark_aux(z, &spec(f)).unwrap();
                let lhs = a.alpha_plus * a.alpha_minus;
                let rhs = a.beta_plus * a.beta_minus;
                assert!((lhs.ratio(&rhs) - 1.0).norm() < 1e-8, "f={f} z={z}");
            }
        }
    }

    #[test]
    fn transfer_matches_difference_where_stable() {
        for z in [Complex64::new(1.0, -0.3), Complex64::new(-2.0, 0.5), Complex64::new(0.3, 1.7)] {
            let a = stark_aux(z, &spec(0.5)).unwrap();
            let diff = (a.beta_minus - a.beta_plus).to_complex();
            assert!((diff - a.wronskian * a.transfer).norm() < 1e-9 * diff.norm());
        }
    }

    #[test]
    fn transfer_without_field_is_a_sine() {
        let z = Complex64::new(3.0, -1.0);
        let w = z.sqrt();
        let (y, dy) = propagate(0.0, z, -1.0, 1.0, Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
        assert!((y - (2.0 * w).sin() / w).norm() < 1e-13, "{y} {}", (2.0 * w).sin() / w);
        assert!((dy - (2.0 * w).cos()).norm() < 1e-13, "{dy} {}", (2.0 * w).cos());
    }

    #[test]
    fn wronskian_is_constant() {
        let sp = spec(0.05);
        let z = Complex64::new(1.2, -0.4);
        let expected = wronskian(0.05);
        for x in [-1.0, 0.0, 1.0] {
            let w = wronskian_at(&sp, z, x).unwrap();
            assert!((w / expected - 1.0).norm() < 1e-6, "x={x}: {w} vs {expected}");
        }
    }

    #[test]
    fn origin_value_matches_expansion() {
        let f = 1e-5;
        let sp = spec(f);
        let d = det_stark(Complex64::new(0.0, 0.0), &sp).unwrap().value.to_complex();
        let approx = det_origin_expansion(Complex64::new(0.0, 0.0), &sp).unwrap();
        let rel = (d / approx - 1.0).norm();
        assert!(rel < 10.0 * f.powf(2.0 / 3.0), "rel {rel}");
        let leading = origin_coefficients(&sp).c1 / f.cbrt();
        assert!((d / leading - 1.0).norm() < 10.0 * f.cbrt());
    }

    #[test]
    fn origin_slope() {
        let f = 1e-5;
        let sp = spec(f);
        let z = Complex64::new(f, 0.0);
        let d0 = det_stark(Complex64::new(0.0, 0.0), &sp).unwrap().value.to_complex();
        let d1 = det_stark(z, &sp).unwrap().value.to_complex();
        let slope = (d1 - d0) / z;
        let c2 = origin_coefficients(&sp).c2 / f;
        assert!((slope / c2 - 1.0).norm() < 0.05, "{slope} vs {c2}");
    }

    #[test]
    fn requires_field() {
        let free = ModelSpec::free(1.0, 1.0).unwrap();
        assert!(det_stark(Complex64::new(1.0, 0.0), &free).is_err());
        assert!(StarkDeterminant::new(free).is_err());
    }

    #[test]
    fn overflow_is_carried() {
        let d = det_stark(Complex64::new(3.0, -1.0), &spec(1e-3)).unwrap().value;
        assert!(d.is_finite());
        assert!(d.log_abs() > 700.0);
    }
}
