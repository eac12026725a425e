//! Zero counting for the normalized Stark determinant: Jensen and Carleman
//! integrals, radius selection away from zeros, and censuses below the real
//! axis.

use std::f64::consts::{E, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::airy::omega;
use crate::determinants::{det_stark, ModelSpec, Plane};
use crate::error::{Error, Result};
use crate::numerics::{adaptive_quadrature, ExtendedComplex, PhaseTrace, Tolerance};
use crate::rootfinder::{isolate_zeros, winding_contour, Analytic, Contour, Resonance, SearchBox};

/// `D_f(rotation z) / D_f(0)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalizedDeterminant {
    base: ModelSpec,
    rotation: Complex64,
    normalization: ExtendedComplex,
}

impl NormalizedDeterminant {
    pub fn new(base: ModelSpec, rotation: Complex64) -> Result<Self> {
        if (rotation.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Domain("rotation must have unit modulus"));
        }
        let normalization = det_stark(Complex64::new(0.0, 0.0), &base)?.value;
        if normalization.is_zero() || !normalization.is_finite() {
            return Err(Error::Pole);
        }
        Ok(Self { base, rotation, normalization })
    }

    /// `B_f`.
    pub fn upright(base: ModelSpec) -> Result<Self> {
        Self::new(base, Complex64::new(1.0, 0.0))
    }

    /// `B_f(omega^-1 z)`.
    pub fn rotated(base: ModelSpec) -> Result<Self> {
        Self::new(base, omega().conj())
    }

    pub fn base(&self) -> &ModelSpec {
        &self.base
    }

    pub fn rotation(&self) -> Complex64 {
        self.rotation
    }

    pub fn normalization(&self) -> ExtendedComplex {
        self.normalization
    }
}

impl Analytic for NormalizedDeterminant {
    fn eval(&self, z: Complex64) -> ExtendedComplex {
        if z == Complex64::new(0.0, 0.0) {
            return ExtendedComplex::from(1.0);
        }
        let d = det_stark(self.rotation * z, &self.base).expect("spec checked at construction").value;
        d / self.normalization
    }
}

const SAFE_CANDIDATES: usize = 64;
const SAFE_ANGLES: usize = 512;
/// Circles where `ln |B|` drops below this are treated as passing through a
/// zero.
const NEAR_ZERO_LOG: f64 = -30.0;

fn circle_min_log<F: Analytic + ?Sized>(f: &F, r: f64) -> f64 {
    (0..SAFE_ANGLES)
        .map(|k| {
            let t = 2.0 * PI * (k as f64 + 0.5) / SAFE_ANGLES as f64;
            f.eval(Complex64::from_polar(r, t)).log_abs()
        })
        .fold(f64::INFINITY, |m, v| if v.is_nan() { f64::NEG_INFINITY } else { m.min(v) })
}

fn best_radius<F: Analytic + ?Sized>(f: &F, big_r: f64, delta: f64) -> Option<(f64, f64)> {
    let scored: Vec<(f64, f64)> = (0..SAFE_CANDIDATES)
        .into_par_iter()
        .map(|k| {
            let r = big_r * (1.0 - delta * (k as f64 + 0.5) / SAFE_CANDIDATES as f64);
            (r, circle_min_log(f, r))
        })
        .collect();
    scored
        .into_iter()
        .filter(|&(_, m)| m.is_finite() && m > NEAR_ZERO_LOG)
        .fold(None, |best: Option<(f64, f64)>, c| match best {
            Some(b) if b.1 >= c.1 => Some(b),
            _ => Some(c),
        })
}

/// A radius in `((1 - delta) R, R)` whose circle keeps `|f|` as large as
/// possible, chosen from a fixed grid of 64 candidates. If every candidate
/// passes too close to a zero, `delta` is doubled once (capped below 1).
pub fn safe_radius<F: Analytic + ?Sized>(f: &F, big_r: f64, delta: f64) -> Result<f64> {
    if !(big_r > 0.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain("safe radius needs R > 0 and 0 < delta < 1"));
    }
    if let Some((r, _)) = best_radius(f, big_r, delta) {
        return Ok(r);
    }
    let wider = (2.0 * delta).min(0.5 * (1.0 + delta));
    best_radius(f, big_r, wider)
        .map(|(r, _)| r)
        .ok_or_else(|| Error::NoSafeRadius(format!("every circle in ({}, {big_r}) meets a near-zero", (1.0 - wider) * big_r)))
}

/// `ln` of the lower bound `(e^-7 delta)^(c 4 (2 e R)^(3/2) / 3f)` on `|B_f|`
/// outside the exceptional disks.
pub fn cartan_log_bound(f: f64, big_r: f64, delta: f64, c: f64) -> f64 {
    c * 4.0 * (2.0 * E * big_r).powf(1.5) / (3.0 * f) * (delta.ln() - 7.0)
}

/// Smallest `ln |f|` over the safe-radius sampling of the circle `|z| = r`.
pub fn circle_minimum<F: Analytic + ?Sized>(f: &F, r: f64) -> f64 {
    circle_min_log(f, r)
}

const JENSEN_START: usize = 1 << 10;
const JENSEN_MAX: usize = 1 << 20;

fn circle_logs<F: Analytic + ?Sized>(f: &F, r: f64, n: usize, offset: f64) -> Result<Vec<f64>> {
    (0..n)
        .into_par_iter()
        .map(|k| {
            let z = Complex64::from_polar(r, 2.0 * PI * (k as f64 + offset) / n as f64);
            let v = f.eval(z).log_abs();
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::BoundaryZero { point: z })
            }
        })
        .collect()
}

/// `(1/2 pi) integral_0^(2 pi) ln |f(r e^(it))| dt` by the trapezoid rule,
/// doubling from 1024 nodes until successive estimates differ by less than
/// `max(1e-6, 1e-4 |estimate|)`.
pub fn jensen_integral<F: Analytic + ?Sized>(f: &F, r: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Domain("Jensen radius must be positive"));
    }
    let mut n = JENSEN_START;
    let mut sum: f64 = circle_logs(f, r, n, 0.0)?.iter().sum();
    let mut estimate = sum / n as f64;
    while n < JENSEN_MAX {
        // the new nodes sit halfway between the old ones
        sum += circle_logs(f, r, n, 0.5)?.iter().sum::<f64>();
        n *= 2;
        let next = sum / n as f64;
        let diff = (next - estimate).abs();
        estimate = next;
        if diff < 1e-6f64.max(1e-4 * estimate.abs()) {
            return Ok(estimate);
        }
    }
    Err(Error::Quadrature { estimate: Complex64::new(estimate, 0.0), error_bound: f64::NAN })
}

/// Upper bound `(I_J(v r) - I_J(r)) / ln v` on the number of zeros in
/// `|z| <= r`.
pub fn jensen_count_bound<F: Analytic + ?Sized>(f: &F, r: f64, v: f64) -> Result<f64> {
    if !(v > 1.0) {
        return Err(Error::Domain("Jensen ratio v must exceed 1"));
    }
    Ok((jensen_integral(f, v * r)? - jensen_integral(f, r)?) / v.ln())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CarlemanParts {
    /// Imaginary-axis part.
    pub i1: f64,
    /// Arc part, including the phase term on the inner arc.
    pub i2: f64,
}

impl CarlemanParts {
    pub fn total(&self) -> f64 {
        self.i1 + self.i2
    }
}

fn carleman_tolerance() -> Tolerance {
    Tolerance::new(1e-9, 1e-9)
}

const CARLEMAN_INTERVALS: usize = 1 << 15;

fn log_abs_at<F: Analytic + ?Sized>(f: &F, z: Complex64) -> f64 {
    f.eval(z).log_abs()
}

fn real_integral<G: Fn(f64) -> f64>(g: G, a: f64, b: f64) -> Result<f64> {
    let q = adaptive_quadrature(|t| Complex64::new(g(t), 0.0), a, b, carleman_tolerance(), CARLEMAN_INTERVALS)?;
    if !q.value.re.is_finite() {
        return Err(Error::Quadrature { estimate: q.value, error_bound: q.error });
    }
    Ok(q.value.re)
}

/// Carleman's half-plane integrals over the annulus `r_rho < |z| < r_l`,
/// `Re z > 0`, for `f` normalized to 1 at the origin. The total equals
/// `sum (1/|z_n| - |z_n| / r_l^2) cos arg z_n` over the zeros there.
pub fn carleman_integral<F: Analytic + ?Sized>(f: &F, r_rho: f64, r_l: f64) -> Result<CarlemanParts> {
    if !(r_rho > 0.0 && r_rho < r_l) {
        return Err(Error::Domain("Carleman radii need 0 < R_rho < R_L"));
    }
    let i = Complex64::new(0.0, 1.0);
    let w = 1.0 / (r_l * r_l);
    let i1 = real_integral(
        |s| (log_abs_at(f, i * s) + log_abs_at(f, -i * s)) * (1.0 / (s * s) - w),
        r_rho,
        r_l,
    )? / (2.0 * PI);

    let alpha = r_l / r_rho;
    let trace = PhaseTrace::for_winding(|t| f.eval(Complex64::from_polar(r_rho, t)), -0.5 * PI, 0.5 * PI, 64)
        .map_err(|e| match e {
            Error::UnresolvedPhase { at } => Error::BoundaryZero { point: Complex64::from_polar(r_rho, at) },
            other => other,
        })?;
    let outer = real_integral(|t| 2.0 * log_abs_at(f, Complex64::from_polar(r_l, t)) * t.cos(), -0.5 * PI, 0.5 * PI)?;
    let inner = real_integral(
        |t| {
            let v = f.eval(Complex64::from_polar(r_rho, t));
            let phase = trace.unwrap_at(t, v.arg());
            -(alpha + 1.0 / alpha) * v.log_abs() * t.cos() - phase * (alpha - 1.0 / alpha) * t.sin()
        },
        -0.5 * PI,
        0.5 * PI,
    )?;
    Ok(CarlemanParts { i1, i2: (outer + inner) / (2.0 * PI * r_l) })
}

/// `(8 / 9 pi) r^(3/2) / f`.
pub fn predicted_jensen(r: f64, f: f64) -> f64 {
    8.0 / (9.0 * PI) * r.powf(1.5) / f
}

/// `(8 (3 + sqrt 2) / 15 pi) r^(1/2) / f`.
pub fn predicted_carleman(r: f64, f: f64) -> f64 {
    8.0 * (3.0 + 2f64.sqrt()) / (15.0 * PI) * r.sqrt() / f
}

/// Bounds `(lower, upper)` on the number of zeros with `Re z > 0` in
/// `R_l < |z| < R_u`.
pub fn count_envelope(f: f64, r_l: f64, r_u: f64, eps: f64) -> (f64, f64) {
    let (l, u) = (r_l.powf(1.5), r_u.powf(1.5));
    let k = 1.0 / (2.0 * PI * f);
    ((1.0 - eps) * k * (u - 5.0 / 3.0 * l), (1.0 + eps) * k * (5.0 / 3.0 * u - l))
}

/// Exponent of the default inner Carleman radius `f^0.67`.
pub const INNER_RADIUS_EXPONENT: f64 = 0.67;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum CountRegion {
    /// `[a, b] x [-depth, -1e-8]`.
    BelowSegment { a: f64, b: f64, depth: f64 },
    /// `r_l < |z| < r_u`, `Re z > 0`.
    RightHalfAnnulus { r_l: f64, r_u: f64 },
    Disk { r: f64 },
    /// `r_rho < |z| < r_l`, `Re z > 0`, as used by Carleman's formula.
    CarlemanAnnulus { r_rho: f64, r_l: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountReport {
    pub region: CountRegion,
    pub field: f64,
    /// Zeros counted with multiplicity.
    pub zero_count: u64,
    pub scaled_count: f64,
    pub jensen_value: Option<f64>,
    pub carleman_value: Option<f64>,
    pub predicted_jensen: Option<f64>,
    pub predicted_carleman: Option<f64>,
    pub envelope: Option<(f64, f64)>,
    pub safe_radius: Option<f64>,
    pub resonances: Vec<Resonance>,
}

impl CountReport {
    fn new(region: CountRegion, field: f64, zero_count: u64) -> Self {
        Self {
            region,
            field,
            zero_count,
            scaled_count: zero_count as f64 * field,
            jensen_value: None,
            carleman_value: None,
            predicted_jensen: None,
            predicted_carleman: None,
            envelope: None,
            safe_radius: None,
            resonances: Vec::new(),
        }
    }
}

fn stark_field(spec: &ModelSpec) -> Result<f64> {
    spec.field().filter(|f| *f > 0.0).ok_or(Error::InvalidModel("counting needs a Stark model with f > 0".into()))
}

/// Depth `2 M f ln(1/f + b) / sqrt a` of the census box below `[a, b]`.
pub fn census_depth(f: f64, a: f64, b: f64, m: f64) -> f64 {
    2.0 * m * f * (1.0 / f + b).ln() / a.sqrt()
}

/// All zeros of `D_f` in `[a, b] x [-h, -1e-8]` with `h` from
/// [`census_depth`].
pub fn census_below_segment(spec: &ModelSpec, a: f64, b: f64, m: f64) -> Result<CountReport> {
    let f = stark_field(spec)?;
    if !(a > 0.0 && a < 0.5 * b) {
        return Err(Error::Domain("census needs 0 < a < b/2"));
    }
    let depth = census_depth(f, a, b, m);
    let search = SearchBox::from_bounds(a, b, -depth, -1e-8, Plane::Z)?;
    let det = crate::determinants::StarkDeterminant::new(*spec)?;
    let iso = isolate_zeros(&det, &search, 1e-3 * f)?;
    let count = iso.count() as u64;
    let mut report = CountReport::new(CountRegion::BelowSegment { a, b, depth }, f, count);
    report.resonances = iso.resonances;
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeCheck {
    pub lower: f64,
    pub upper: f64,
    pub measured: u64,
    /// The radii actually traced, after any nudging off a zero.
    pub r_l: f64,
    pub r_u: f64,
}

impl EnvelopeCheck {
    pub fn holds(&self) -> bool {
        (self.measured as f64) >= self.lower && (self.measured as f64) <= self.upper
    }
}

/// Counts the zeros of `D_f` with `Re z > 0` in `R_l < |z| < R_u` by the
/// winding around that half annulus and compares with [`count_envelope`].
/// A radius that passes through a zero is shrunk by 0.1% and retried.
pub fn halfplane_count_envelope(spec: &ModelSpec, r_l: f64, r_u: f64, eps: f64) -> Result<EnvelopeCheck> {
    let f = stark_field(spec)?;
    if !(r_l > 0.0 && r_u > 2.0 * r_l) {
        return Err(Error::Domain("envelope needs R_u > 2 R_l > 0"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain("envelope needs 0 < eps < 1"));
    }
    let det = crate::determinants::StarkDeterminant::new(*spec)?;
    let (lower, upper) = count_envelope(f, r_l, r_u, eps);
    let (mut inner, mut outer) = (r_l, r_u);
    let mut last = Error::BoundaryZero { point: Complex64::new(r_l, 0.0) };
    for _ in 0..8 {
        let contour = Contour::AnnularSector { r_inner: inner, r_outer: outer, theta_start: -0.5 * PI, theta_end: 0.5 * PI };
        match winding_contour(&det, &contour) {
            Ok(w) => {
                let measured = u64::try_from(w.winding).map_err(|_| Error::NoConvergence("negative winding of an entire function"))?;
                return Ok(EnvelopeCheck { lower, upper, measured, r_l: inner, r_u: outer });
            }
            Err(e @ Error::BoundaryZero { .. }) => {
                last = e;
                inner *= 0.999;
                outer *= 0.999;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

/// Jensen study at a safe radius in `((1 - f) R, R)`.
pub fn jensen_study(spec: &ModelSpec, big_r: f64) -> Result<CountReport> {
    let f = stark_field(spec)?;
    let b = NormalizedDeterminant::upright(*spec)?;
    let r = safe_radius(&b, big_r, f.min(0.5))?;
    let value = jensen_integral(&b, r)?;
    let zeros = winding_contour(&b, &Contour::Circle { center: Complex64::new(0.0, 0.0), radius: r })?.winding;
    let mut report = CountReport::new(CountRegion::Disk { r }, f, zeros.max(0) as u64);
    report.jensen_value = Some(value);
    report.predicted_jensen = Some(predicted_jensen(r, f));
    report.safe_radius = Some(r);
    Ok(report)
}

/// Carleman study with the inner radius chosen safely just below
/// `f^0.67` and the outer one just below `R_L`.
pub fn carleman_study(spec: &ModelSpec, r_l: f64) -> Result<CountReport> {
    let f = stark_field(spec)?;
    let b = NormalizedDeterminant::upright(*spec)?;
    let r_outer = safe_radius(&b, r_l, f.min(0.5))?;
    let r_rho = safe_radius(&b, f.powf(INNER_RADIUS_EXPONENT), 0.1)?;
    let parts = carleman_integral(&b, r_rho, r_outer)?;
    let zeros = winding_contour(
        &b,
        &Contour::AnnularSector { r_inner: r_rho, r_outer, theta_start: -0.5 * PI, theta_end: 0.5 * PI },
    )?
    .winding;
    let mut report = CountReport::new(CountRegion::CarlemanAnnulus { r_rho, r_l: r_outer }, f, zeros.max(0) as u64);
    report.carleman_value = Some(parts.total());
    report.predicted_carleman = Some(predicted_carleman(r_outer, f));
    report.safe_radius = Some(r_outer);
    Ok(report)
}
