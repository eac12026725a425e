//! Zeros of the free-model factors `F_+` and `F_-` by a real reduction.
//!
//! With `s = 2 eta`, `t = 2 kappa`, `q = t/s` and `zeta = x + i y`, a zero
//! `w` of `F_(+/-)(s, t; .)` corresponds to a solution of
//! `zeta e^(-zeta) = (+/-) q e^q` through `i t w = zeta + q`. Its imaginary
//! part forces `x = y cot y`, leaving the scalar
//! equation `y / sin y = (+/-) q e^q e^(y cot y)`, which has exactly one
//! root in each interval `(n pi, (n + 1) pi)` (for `n = 0` only when
//! `q + ln q > -1`). Even `n` belong to `F_+`, odd `n` to `F_-`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::determinants::{f_factor, ModelSpec, Sign};
use crate::error::{Error, Result};

const ENDPOINT_INSET: f64 = 1e-12 * PI;
const BISECTION_STEPS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShapeRoot {
    pub n: usize,
    pub sign: Sign,
    pub w: Complex64,
    /// `(n pi / t, (n + 1) pi / t)`, which contains `Re w`.
    pub interval: (f64, f64),
    /// `|F(w)|` after polishing.
    pub residual: f64,
}

fn params(spec: &ModelSpec) -> (f64, f64) {
    (2.0 * spec.eta, 2.0 * spec.kappa)
}

/// `ln |y / sin y| - y cot y - (ln q + q)`, increasing on each interval.
fn reduced(y: f64, q: f64) -> f64 {
    (y / y.sin()).abs().ln() - y / y.tan() - (q.ln() + q)
}

/// The `n`-th zero in the right half plane: of `F_+` for even `n`, of `F_-`
/// for odd `n`.
pub fn shape_root(n: usize, spec: &ModelSpec) -> Result<ShapeRoot> {
    let (s, t) = params(spec);
    let q = t / s;
    let mut lo = n as f64 * PI + ENDPOINT_INSET;
    let mut hi = (n + 1) as f64 * PI - ENDPOINT_INSET;
    if n == 0 {
        // y cot y -> 1 as y -> 0, so the left end is finite
        lo = ENDPOINT_INSET;
    }
    let (g_lo, g_hi) = (reduced(lo, q), reduced(hi, q));
    if !(g_lo < 0.0 && g_hi > 0.0) {
        return Err(Error::NoBracket { index: n });
    }
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if reduced(mid, q) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let y = 0.5 * (lo + hi);
    let x = y / y.tan();
    let sign = if n % 2 == 0 { Sign::Plus } else { Sign::Minus };
    let w = polish(Complex64::new(y / t, -(x + q) / t), s, t, sign);
    let residual = f_factor(sign, s, t, w)?.norm();
    Ok(ShapeRoot { n, sign, w, interval: (n as f64 * PI / t, (n + 1) as f64 * PI / t), residual })
}

/// Newton on `s w F(w) = s w + i (1 +/- e^(i t w))`, kept only while it
/// lowers the residual.
fn polish(mut w: Complex64, s: f64, t: f64, sign: Sign) -> Complex64 {
    let i = Complex64::new(0.0, 1.0);
    let pm = sign.value();
    let h = |w: Complex64| s * w + i * (1.0 + pm * (i * t * w).exp());
    let mut best = h(w).norm();
    for _ in 0..8 {
        let e = (i * t * w).exp();
        let step = h(w) / (s - pm * t * e);
        let next = w - step;
        let r = h(next).norm();
        if !(r < best) {
            break;
        }
        w = next;
        best = r;
    }
    w
}

/// `(lower, upper)` bounds on `Im w` for a zero with real part `u`, valid
/// when `t > s`.
pub fn imaginary_band(spec: &ModelSpec, u: f64) -> (f64, f64) {
    let (s, t) = params(spec);
    let su2 = (s * u).powi(2);
    (-(2.0 * su2).ln_1p() / (2.0 * t), -su2.ln_1p() / (4.0 * t))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PerturbationOrder {
    First,
    Second,
}

/// Small-`eta` expansion of the `n`-th zero,
/// `w0 [1 - s/t + (s/t)^2 - i s^2 w0 / (2t)]` with `w0 = (n + 1) pi / t`.
pub fn shape_perturbative(n: usize, spec: &ModelSpec, order: PerturbationOrder) -> Complex64 {
    let (s, t) = params(spec);
    let w0 = (n + 1) as f64 * PI / t;
    let r = s / t;
    match order {
        PerturbationOrder::First => Complex64::new(w0 * (1.0 - r), 0.0),
        PerturbationOrder::Second => w0 * Complex64::new(1.0 - r + r * r, -s * s * w0 / (2.0 * t)),
    }
}

/// The same expansion written for `sqrt z_n`, `n >= 1`:
/// `(n pi / 2 kappa)(1 - eta/kappa + (eta/kappa)^2 - i (eta^2/kappa)(n pi / 2 kappa))`.
pub fn shape_sqrt_energy(n: usize, spec: &ModelSpec) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::Domain("the sqrt z_n expansion starts at n = 1"));
    }
    let (k, e) = (spec.kappa, spec.eta);
    let base = n as f64 * PI / (2.0 * k);
    let r = e / k;
    Ok(base * Complex64::new(1.0 - r + r * r, -(e * e / k) * base))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::determinants::det_free;
    use proptest::prelude::*;

    fn spec(kappa: f64, eta: f64) -> ModelSpec {
        ModelSpec::free(kappa, eta).unwrap()
    }

    #[test]
    fn small_coupling_limit() {
        let sp = spec(1.0, 1e-4);
        for n in 0..=5 {
            let r = shape_root(n, &sp).unwrap();
            assert!((r.w - (1 + n) as f64 * PI / 2.0).norm() < 1e-3);
        }
    }

    #[test]
    fn roots_are_zeros_and_in_band() {
        let sp = spec(1.0, 0.5);
        for n in 0..=50 {
            let r = shape_root(n, &sp).unwrap();
            assert!(r.residual < 1e-10, "n={n} residual {}", r.residual);
            assert!(r.w.re > r.interval.0 && r.w.re < r.interval.1);
            let (lo, hi) = imaginary_band(&sp, r.w.re);
            assert!(r.w.im > lo && r.w.im < hi, "n={n}: {} not in ({lo}, {hi})", r.w.im);
            assert!(det_free(r.w, &sp).unwrap().value.log_abs() < (1e-8f64).ln());
        }
    }

    #[test]
    fn parity_and_mirror() {
        let sp = spec(1.0, 0.3);
        let (s, t) = (0.6, 2.0);
        for n in 0..20 {
            let r = shape_root(n, &sp).unwrap();
            let other = if r.sign == Sign::Plus { Sign::Minus } else { Sign::Plus };
            assert_eq!(r.sign == Sign::Plus, n % 2 == 0);
            assert!(f_factor(other, s, t, r.w).unwrap().norm() > 0.1);
            assert!(f_factor(r.sign, s, t, -r.w.conj()).unwrap().norm() < 1e-9);
        }
    }

    #[test]
    fn missing_first_root() {
        // q + ln q <= -1 leaves no root below pi
        let sp = spec(0.1, 1.0);
        assert!(matches!(shape_root(0, &sp), Err(Error::NoBracket { index: 0 })));
        assert!(shape_root(1, &sp).is_ok());
    }

    #[test]
    fn expansion_forms() {
        let sp = spec(1.3, 0.0001);
        let w = shape_perturbative(3, &ModelSpec { eta: 0.0, ..sp }, PerturbationOrder::Second);
        assert_eq!(w, Complex64::new(4.0 * PI / 2.6, 0.0));
        for n in 1..=10 {
            let a = shape_sqrt_energy(n, &sp).unwrap();
            let b = shape_perturbative(n - 1, &sp, PerturbationOrder::Second);
            assert!((a - b).norm() < 1e-14 * b.norm());
            assert!(b.im < 0.0);
        }
        assert!(shape_sqrt_energy(0, &sp).is_err());
    }

    #[test]
    fn expansion_error_is_third_order() {
        let sp = spec(1.0, 0.01);
        let r = shape_root(0, &sp).unwrap();
        let p = shape_perturbative(0, &sp, PerturbationOrder::Second);
        assert!((r.w - p).norm() < 10.0 * 1e-6 * r.w.norm());
        // halving eta shrinks the error about eightfold
        let sp2 = spec(1.0, 0.005);
        let e2 = (shape_root(0, &sp2).unwrap().w - shape_perturbative(0, &sp2, PerturbationOrder::Second)).norm();
        let ratio = (r.w - p).norm() / e2;
        assert!(ratio > 7.0 && ratio < 9.0, "ratio {ratio}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn residual_small_across_parameters(kappa in 0.2f64..3.0, eta in 0.01f64..3.0, n in 1usize..60) {
            let sp = spec(kappa, eta);
            let r = shape_root(n, &sp).unwrap();
            prop_assert!(r.residual < 1e-9);
        }
    }
}
