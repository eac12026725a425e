//! The Airy function `Ai` on the whole complex plane.
//!
//! Three evaluation paths are combined:
//!
//! * the Maclaurin series for `|z| <= 8`, accepted when its terms do not
//!   cancel by more than a factor of `1e6`;
//! * the large-argument expansion for `|z| > 8` and `|arg z| <= 2 pi / 3`,
//!   truncated at its smallest term (at most 20 terms);
//! * for `|arg z| > 2 pi / 3`, the connection formula
//!   `Ai(z) + w Ai(w z) + w^2 Ai(w^2 z) = 0` with `w = exp(2 pi i / 3)`, which
//!   moves both arguments into the good sector.
//!
//! Where the series cancels badly (the sectors where `Ai` is recessive or
//! oscillatory) the value is obtained by integrating `y'' = z y` from radius
//! 12 on the same ray, where the expansion is accurate to rounding. That
//! direction of integration does not amplify the dominant solution.

use std::f64::consts::PI;
use std::sync::LazyLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::numerics::ExtendedComplex;

/// `Ai(0) = 1 / (3^(2/3) Gamma(2/3))`.
pub const AI0: f64 = 0.355_028_053_887_817_239_260_063_2;
/// `Ai'(0) = -1 / (3^(1/3) Gamma(1/3))`.
pub const AIP0: f64 = -0.258_819_403_792_806_798_405_183_6;

pub const SERIES_RADIUS: f64 = 8.0;
const CONTINUATION_RADIUS: f64 = 12.0;
const MAX_SERIES_TERMS: usize = 120;
const MAX_ASYMPTOTIC_TERMS: usize = 20;
const CANCELLATION_LIMIT: f64 = 1e6;

/// `exp(2 pi i / 3)`.
pub fn omega() -> Complex64 {
    Complex64::new(-0.5, 0.75f64.sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AiryMethod {
    Series,
    Asymptotic,
    RotatedAsymptotic,
    Continuation,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AirySample {
    pub value: ExtendedComplex,
    pub derivative: ExtendedComplex,
    pub method: AiryMethod,
    /// Relative size of the first omitted term (zero for the series).
    pub trunc_error: f64,
}

/// Coefficients `c_k = Gamma(3k + 1/2) / (54^k k! Gamma(k + 1/2))`.
static EXPANSION: LazyLock<[f64; MAX_ASYMPTOTIC_TERMS + 1]> = LazyLock::new(|| {
    let mut c = [0.0; MAX_ASYMPTOTIC_TERMS + 1];
    c[0] = 1.0;
    for k in 1..=MAX_ASYMPTOTIC_TERMS {
        let kf = k as f64;
        c[k] = c[k - 1] * (3.0 * kf - 0.5) * (3.0 * kf - 1.5) * (3.0 * kf - 2.5) / (54.0 * kf * (kf - 0.5));
    }
    c
});

/// The expansion coefficients, exposed for checks.
pub fn expansion_coefficient(k: usize) -> f64 {
    EXPANSION[k]
}

fn nan_sample() -> AirySample {
    let nan = ExtendedComplex::new(Complex64::new(f64::NAN, f64::NAN), 0);
    AirySample { value: nan, derivative: nan, method: AiryMethod::Series, trunc_error: f64::NAN }
}

/// `Ai(z)` and `Ai'(z)`.
pub fn airy(z: Complex64) -> AirySample {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return nan_sample();
    }
    if z.norm() <= SERIES_RADIUS {
        airy_inner(z)
    } else {
        airy_outer(z)
    }
}

/// Rotation applied to the argument before evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Rotation {
    None,
    /// Multiply by `exp(2 pi i / 3)`.
    Omega,
    /// Multiply by `exp(-2 pi i / 3)`.
    OmegaBar,
}

impl Rotation {
    pub fn factor(self) -> Complex64 {
        match self {
            Rotation::None => Complex64::new(1.0, 0.0),
            Rotation::Omega => omega(),
            Rotation::OmegaBar => omega().conj(),
        }
    }
}

/// `Ai(rho z)` for the chosen rotation `rho`, evaluated in whichever sector
/// is stable.
pub fn airy_rotated(z: Complex64, rotation: Rotation) -> AirySample {
    airy(rotation.factor() * z)
}

/// Series evaluation with the continuation fallback. Intended for
/// `|z| <= 10`; also used to cross-check the outer paths.
pub fn airy_inner(z: Complex64) -> AirySample {
    let (value, derivative, cancellation) = maclaurin(z);
    if cancellation <= CANCELLATION_LIMIT {
        return AirySample {
            value: value.into(),
            derivative: derivative.into(),
            method: AiryMethod::Series,
            trunc_error: 0.0,
        };
    }
    continuation(z)
}

/// Large-argument evaluation: direct in `|arg z| <= 2 pi / 3`, through the
/// connection formula otherwise.
pub fn airy_outer(z: Complex64) -> AirySample {
    let theta = z.arg();
    if theta.abs() <= 2.0 * PI / 3.0 {
        return asymptotic(z);
    }
    let r = z.norm();
    let w = omega();
    let w2 = w.conj();
    let shift = |d: f64| {
        let mut t = theta + d;
        if t > PI {
            t -= 2.0 * PI;
        } else if t <= -PI {
            t += 2.0 * PI;
        }
        Complex64::from_polar(r, t)
    };
    let a = asymptotic(shift(2.0 * PI / 3.0));
    let b = asymptotic(shift(-2.0 * PI / 3.0));
    let value = -(a.value * w + b.value * w2);
    let derivative = -(a.derivative * (w * w) + b.derivative * (w2 * w2));
    let scale = a.value.log_abs().max(b.value.log_abs()) - value.log_abs();
    AirySample {
        value,
        derivative,
        method: AiryMethod::RotatedAsymptotic,
        trunc_error: a.trunc_error.max(b.trunc_error) * scale.exp().max(1.0),
    }
}

/// Returns `(Ai, Ai', sum |terms| / |Ai|)`.
fn maclaurin(z: Complex64) -> (Complex64, Complex64, f64) {
    let z2 = z * z;
    let z3 = z2 * z;
    // value terms for the two interleaved sequences k = 0 mod 3 and k = 1 mod 3
    let mut t0 = Complex64::new(AI0, 0.0);
    let mut t1 = z * AIP0;
    let mut d1 = Complex64::new(AIP0, 0.0);
    let mut sum = t0 + t1;
    let mut dsum = d1;
    let mut abs_sum = t0.norm() + t1.norm();
    let mut dabs_sum = d1.norm();
    let mut k = 0usize;
    let mut terms = 2;
    while terms < MAX_SERIES_TERMS {
        let kf = k as f64;
        // derivative terms from the value terms before advancing
        let d0_next = t0 * z2 / (kf + 2.0);
        d1 = t1 * z2 / (kf + 3.0);
        t0 = t0 * z3 / ((kf + 3.0) * (kf + 2.0));
        t1 = t1 * z3 / ((kf + 4.0) * (kf + 3.0));
        sum += t0 + t1;
        dsum += d0_next + d1;
        abs_sum += t0.norm() + t1.norm();
        dabs_sum += d0_next.norm() + d1.norm();
        terms += 2;
        k += 3;
        let tail = t0.norm() + t1.norm() + d0_next.norm() + d1.norm();
        if tail <= 1e-18 * (sum.norm() + dsum.norm()) {
            break;
        }
    }
    let ratio = (abs_sum / sum.norm()).max(dabs_sum / dsum.norm());
    (sum, dsum, if ratio.is_finite() { ratio } else { f64::INFINITY })
}

/// Truncated large-argument expansion, valid for `|arg z| < pi`.
fn asymptotic(z: Complex64) -> AirySample {
    let sqrt_z = z.sqrt();
    let xi = z * sqrt_z * (2.0 / 3.0);
    let inv = xi.inv();
    let mut sum = Complex64::new(1.0, 0.0);
    let mut dsum = Complex64::new(0.0, 0.0);
    let mut power = Complex64::new(1.0, 0.0);
    let mut prev = 1.0;
    let mut dropped = 0.0;
    for k in 1..=MAX_ASYMPTOTIC_TERMS {
        power *= inv;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let term = power * (sign * EXPANSION[k]);
        let size = term.norm();
        if size > prev || k == MAX_ASYMPTOTIC_TERMS {
            dropped = size;
            break;
        }
        sum += term;
        dsum -= term * inv * k as f64;
        prev = size;
    }
    let quarter = sqrt_z.sqrt();
    let prefactor = ExtendedComplex::exp(-xi) * (0.5 / PI.sqrt());
    let value = prefactor * (sum / quarter);
    let derivative = prefactor * (quarter * (dsum - sum - sum * inv / 6.0));
    AirySample {
        value,
        derivative,
        method: AiryMethod::Asymptotic,
        trunc_error: dropped / sum.norm(),
    }
}

/// Integrates `y'' = z y` by Taylor steps from radius 12 on the ray through `z`.
fn continuation(z: Complex64) -> AirySample {
    let r = z.norm();
    let start_r = CONTINUATION_RADIUS.max(r + 2.0);
    let start = if r == 0.0 { Complex64::new(start_r, 0.0) } else { z * (start_r / r) };
    let s = airy_outer(start);
    let mut y = s.value.to_complex();
    let mut dy = s.derivative.to_complex();
    let path = z - start;
    let steps = (path.norm() / 0.5).ceil().max(1.0) as usize;
    let h = path / steps as f64;
    let mut p = start;
    for _ in 0..steps {
        (y, dy) = taylor_step(p, y, dy, h);
        p += h;
    }
    AirySample {
        value: y.into(),
        derivative: dy.into(),
        method: AiryMethod::Continuation,
        trunc_error: s.trunc_error,
    }
}

fn taylor_step(p: Complex64, y: Complex64, dy: Complex64, h: Complex64) -> (Complex64, Complex64) {
    // coefficients of y(p + u) = sum c_k u^k with (k+2)(k+1) c_{k+2} = p c_k + c_{k-1}
    let mut c_prev = Complex64::new(0.0, 0.0);
    let mut c0 = y;
    let mut c1 = dy;
    let mut hk = Complex64::new(1.0, 0.0);
    let mut value = c0 + c1 * h;
    let mut deriv = c1;
    let scale = y.norm() + dy.norm() * h.norm();
    for k in 0..200usize {
        let kf = k as f64;
        let c2 = (p * c0 + c_prev) / ((kf + 2.0) * (kf + 1.0));
        // hk holds h^(k+1) after this update
        hk *= h;
        let term = c2 * hk * h;
        value += term;
        deriv += c2 * hk * (kf + 2.0);
        c_prev = c0;
        c0 = c1;
        c1 = c2;
        if k > 4 && term.norm() <= 1e-18 * scale && (c0 * hk).norm() <= 1e-18 * scale {
            break;
        }
    }
    (value, deriv)
}

/// Relative residual of the Airy equation from a centred second difference,
/// `|A(z+h) - 2A(z) + A(z-h) - h^2 z A(z)| / (h^2 |z A(z)|)`.
pub fn airy_ode_residual(z: Complex64, h: f64) -> f64 {
    let centre = airy(z).value;
    let hc = Complex64::new(h, 0.0);
    let up = airy(z + hc).value.ratio(&centre);
    let down = airy(z - hc).value.ratio(&centre);
    let num = (up - 2.0 + down - z * h * h).norm();
    num / (h * h * z.norm() + 1e-300)
}

/// Default step `1e-4 * max(1, |z|)` for [`airy_ode_residual`].
pub fn default_residual_step(z: Complex64) -> f64 {
    1e-4 * z.norm().max(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // Reference values from a 40-digit evaluation: (z, Ai(z), Ai'(z)).
    const REFERENCE: [(f64, f64, f64, f64, f64, f64); 13] = [
        (1.0, 0.0, 0.13529241631288141552, 0.0, -0.15914744129679321279, 0.0),
        (5.0, 5.0, 0.00099883507797102461652, 0.0010158242138396364753, -0.0014697895555206660871, -0.0035139017175533134567),
        (-10.0, 0.0, 0.040241238486443190689, 0.0, 0.9962650441327900559, 0.0),
        (-29.985196810971946, 0.9423227723438496, -5.3940872221634207519, 20.29361798700063821, 111.560792162062899, 27.96096304314372689),
        (2.5, -1.5, -0.017675940123105692236, 0.012457640201063189569, 0.025097616844942297786, -0.028797519109549521022),
        (-4.0, 3.0, -77.725464487845781228, -39.534746078208684411, -31.079950350093350796, 188.81240385595297893),
        (6.5, 0.2, 2.4392843919439705152e-6, -1.3880558234248797849e-6, -6.3631334897875079482e-6, 3.4977513945748809047e-6),
        (7.9, 0.0, 6.2396400972839341797e-8, 0.0, -1.7729958329430335231e-7, 0.0),
        (-7.06201340706415, 9.701956845835081, -90660584873.260791323, -73249866929.377480832, -83566200289.775092724, 392525305114.10869078),
        (0.3, -0.1, 0.27838633295213664371, 0.024548820764334608859, -0.24617137187861524064, -0.0084417845657075238323),
        (17.551651237807455, -9.58851077208406, -1.4983419056620065319e-20, 1.0717277669752285401e-21, 6.3909267462072923914e-20, -2.11450846214025802e-20),
        (54.03023058681397, 84.14709848078965, 2.1158539801083490644e-22, 2.0561508366027272114e-22, -8.7178375407078391816e-22, -2.818669636467793787e-21),
        (8.598028402130454, 2.659681859952056, -7.2363732745915312532e-10, -1.4817365872796418431e-8, -4.3618390442621484792e-9, 4.4658152632148059943e-8),
    ];

    #[test]
    fn matches_reference_values() {
        for &(x, y, ar, ai, dr, di) in &REFERENCE {
            let s = airy(c(x, y));
            let a = c(ar, ai);
            let d = c(dr, di);
            let ea = (s.value.to_complex() - a).norm() / a.norm();
            let ed = (s.derivative.to_complex() - d).norm() / d.norm();
            println!("z = {x}+{y}i  {:?}  rel err value {ea:.2e} derivative {ed:.2e}", s.method);
            assert!(ea < 1e-9, "value at {x}+{y}i");
            assert!(ed < 1e-8, "derivative at {x}+{y}i");
        }
    }

    #[test]
    fn values_at_origin() {
        let s = airy(c(0.0, 0.0));
        assert_eq!(s.method, AiryMethod::Series);
        assert!((s.value.to_complex() - AI0).norm() < 1e-15);
        assert!((s.derivative.to_complex() - AIP0).norm() < 1e-15);
    }

    #[test]
    fn first_coefficients() {
        assert_eq!(expansion_coefficient(0), 1.0);
        assert!((expansion_coefficient(1) - 5.0 / 72.0).abs() < 1e-16);
        assert!((expansion_coefficient(2) - 385.0 / 10368.0).abs() < 1e-15);
    }

    #[test]
    fn large_positive_argument_in_log_form() {
        let s = airy(c(40.0, 0.0));
        assert_eq!(s.method, AiryMethod::Asymptotic);
        let expect = -(2.0 / 3.0) * 40f64.powf(1.5) - 0.25 * 40f64.ln() - (2.0 * PI.sqrt()).ln();
        assert!((s.value.log_abs() - expect).abs() < 1e-3);
        let far = airy(c(1.0e4, 0.0));
        assert!(far.value.log_abs() < -6.6e5);
        assert!(far.trunc_error < 1e-9);
    }

    #[test]
    fn near_negative_axis_uses_rotation() {
        let s = airy(Complex64::from_polar(30.0, 0.99 * PI));
        assert_eq!(s.method, AiryMethod::RotatedAsymptotic);
    }

    #[test]
    fn ode_residuals() {
        for z in [c(5.0, 5.0), c(-10.0, 0.0)] {
            let r = airy_ode_residual(z, default_residual_step(z));
            assert!(r < 1e-5, "{z}: {r}");
        }
    }
}
