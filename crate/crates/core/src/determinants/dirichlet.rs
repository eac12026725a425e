use std::f64::consts::PI;

use num_complex::Complex64;

use crate::determinants::{free_numerator, g_b, DeterminantValue, ModelSpec, Plane};
use crate::error::{Error, Result};
use crate::numerics::ExtendedComplex;
use crate::rootfinder::Analytic;

const I: Complex64 = Complex64::new(0.0, 1.0);

fn wall_of(spec: &ModelSpec) -> Result<f64> {
    spec.wall()
        .ok_or_else(|| Error::InvalidModel("the Dirichlet determinant needs a wall position".into()))
}

fn ext_sin(w: Complex64) -> ExtendedComplex {
    (ExtendedComplex::exp(I * w) - ExtendedComplex::exp(-I * w)) * Complex64::new(0.0, -0.5)
}

fn ext_cos(w: Complex64) -> ExtendedComplex {
    (ExtendedComplex::exp(I * w) + ExtendedComplex::exp(-I * w)) * 0.5
}

/// `eta^2 D(0) = eta^2 + 2 l eta + 2 kappa (l - kappa)`, divided by `eta^2`.
pub fn dirichlet_limit_at_zero(spec: &ModelSpec) -> Result<f64> {
    let l = wall_of(spec)?;
    let (k, e) = (spec.kappa, spec.eta);
    Ok((e * e + 2.0 * l * e + 2.0 * k * (l - k)) / (e * e))
}

/// The two parts `(D_1, D_2)` with
/// `D_1 = -i e^(2 i l w) g_b(2 kappa w) / (2 eta^2 w^2)`, `b = eta/kappa`, and
/// `D_2 = h_0(w) / (4 eta^2 w^2)`.
pub fn dirichlet_split(w: Complex64, spec: &ModelSpec) -> Result<(ExtendedComplex, ExtendedComplex)> {
    let l = wall_of(spec)?;
    if w.re == 0.0 && w.im == 0.0 {
        return Err(Error::Pole);
    }
    let (k, e) = (spec.kappa, spec.eta);
    let w2 = w * w;
    let d1 = (ExtendedComplex::exp(2.0 * I * l * w) * g_b(e / k, 2.0 * k * w)).scale_by(-I / (2.0 * e * e * w2));
    let d2 = free_numerator(w, spec).scale_by((4.0 * e * e * w2).inv());
    Ok((d1, d2))
}

/// Unsplit form, kept as an independent check on [`dirichlet_split`].
pub fn det_dirichlet_direct(w: Complex64, spec: &ModelSpec) -> Result<ExtendedComplex> {
    let l = wall_of(spec)?;
    if w.re == 0.0 && w.im == 0.0 {
        return Ok(ExtendedComplex::from(dirichlet_limit_at_zero(spec)?));
    }
    let (k, e) = (spec.kappa, spec.eta);
    let wall = ExtendedComplex::exp(2.0 * I * l * w) * ext_cos(2.0 * k * w);
    let second = (ExtendedComplex::from(1.0) - wall).scale_by(I / (e * w));
    let third = (ExtendedComplex::exp(I * (k + l) * w) * ext_sin((k - l) * w) * ext_sin(2.0 * k * w))
        .scale_by(-1.0 / (e * e * w * w));
    Ok(ExtendedComplex::from(1.0) + second + third)
}

/// Dirichlet-model determinant as a function of `w = sqrt z`, finite at
/// `w = 0`.
pub fn det_dirichlet(w: Complex64, spec: &ModelSpec) -> Result<DeterminantValue> {
    let value = if w.re == 0.0 && w.im == 0.0 {
        ExtendedComplex::from(dirichlet_limit_at_zero(spec)?)
    } else {
        let (d1, d2) = dirichlet_split(w, spec)?;
        d1 + d2
    };
    Ok(DeterminantValue { value, plane: Plane::W, region_tag: None, trunc_error: 0.0 })
}

/// Whether `z = w^2` lies in the region that contains all zeros once the
/// wall is far enough out: within angle `c log(l + |z|) / (l |z|^(1/2))`
/// below the positive axis on either end of the `arg z in [-2 pi, 2 pi)`
/// range.
pub fn in_dirichlet_zero_set(w: Complex64, l: f64, c: f64) -> bool {
    let r = w.norm_sqr();
    if r == 0.0 {
        return false;
    }
    let mut arg_w = w.arg();
    if arg_w >= PI {
        arg_w -= 2.0 * PI;
    }
    let theta = 2.0 * arg_w;
    let width = c * (l + r).ln() / (l * r.sqrt());
    (theta < 0.0 && theta > -width) || (theta >= -2.0 * PI && theta < -2.0 * PI + width)
}

/// [`det_dirichlet`] packaged for the root finder (w-plane).
#[derive(Clone, Copy, Debug)]
pub struct DirichletDeterminant {
    spec: ModelSpec,
}

impl DirichletDeterminant {
    pub fn new(spec: ModelSpec) -> Result<Self> {
        wall_of(&spec)?;
        Ok(Self { spec })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }
}

impl Analytic for DirichletDeterminant {
    fn eval(&self, w: Complex64) -> ExtendedComplex {
        det_dirichlet(w, &self.spec).expect("spec checked at construction").value
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::determinants::det_free;
    use proptest::prelude::*;

    fn spec(l: f64) -> ModelSpec {
        ModelSpec::dirichlet(1.0, 1.0, l).unwrap()
    }

    #[test]
    fn limit_at_zero() {
        assert_eq!(dirichlet_limit_at_zero(&spec(20.0)).unwrap(), 79.0);
        let near = det_dirichlet(Complex64::new(1e-6, -1e-6), &spec(20.0)).unwrap().value.to_complex();
        assert!((near - 79.0).norm() < 0.1);
        assert_eq!(det_dirichlet(Complex64::new(0.0, 0.0), &spec(20.0)).unwrap().value.to_complex().re, 79.0);
    }

    #[test]
    fn split_matches_direct_at_sample_point() {
        let w = Complex64::new(1.0, -0.05);
        let sp = spec(20.0);
        let a = det_dirichlet(w, &sp).unwrap().value;
        let b = det_dirichlet_direct(w, &sp).unwrap();
        assert!((a.ratio(&b) - 1.0).norm() < 1e-9);
    }

    #[test]
    fn second_part_is_free_determinant() {
        let w = Complex64::new(2.3, -0.4);
        let sp = spec(20.0);
        let (_, d2) = dirichlet_split(w, &sp).unwrap();
        let free = det_free(w, &sp.without_field()).unwrap().value;
        assert!((d2.ratio(&free) - 1.0).norm() < 1e-14);
    }

    #[test]
    fn zero_set_membership() {
        let l = 50.0;
        assert!(in_dirichlet_zero_set(Complex64::from_polar(1.0, -1e-4), l, 0.75 * PI));
        assert!(!in_dirichlet_zero_set(Complex64::from_polar(1.0, -0.3), l, 0.75 * PI));
        assert!(!in_dirichlet_zero_set(Complex64::from_polar(1.0, 1e-4), l, 0.75 * PI));
        assert!(in_dirichlet_zero_set(Complex64::from_polar(1.0, -PI + 1e-4), l, 0.75 * PI));
    }

    proptest! {
        #[test]
        fn split_matches_direct(re in -20.0f64..20.0, im in -5.0f64..5.0, l in 2.0f64..200.0) {
            let w = Complex64::new(re, im);
            prop_assume!(w.norm() > 0.05);
            let sp = spec(l);
            let a = det_dirichlet(w, &sp).unwrap().value;
            let b = det_dirichlet_direct(w, &sp).unwrap();
            let scale = a.log_abs().max(b.log_abs());
            prop_assert!((a - b).log_abs() - scale < (1e-9f64).ln());
        }

        #[test]
        fn conjugate_reflection(re in 0.01f64..20.0, im in -5.0f64..5.0) {
            let w = Complex64::new(re, im);
            let sp = spec(20.0);
            let a = det_dirichlet(-w.conj(), &sp).unwrap().value;
            let b = det_dirichlet(w, &sp).unwrap().value.conj();
            prop_assert!((a - b).log_abs() - b.log_abs() < (1e-10f64).ln());
        }
    }
}
