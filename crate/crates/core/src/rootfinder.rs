//! Zero location by the argument principle.
//!
//! Windings are read off a [`PhaseTrace`] around a closed contour, traced at
//! two sampling densities that must agree. Isolation subdivides a box into
//! quarters until every piece holds at most one zero (or is below the
//! requested resolution), then refines each zero with Muller's method.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::determinants::Plane;
use crate::error::{Error, Result};
use crate::numerics::{ExtendedComplex, PhaseTrace};

/// A function analytic on the region of interest, evaluated in extended
/// range. Implementations must be callable from several threads.
pub trait Analytic: Sync {
    fn eval(&self, p: Complex64) -> ExtendedComplex;
}

impl<F> Analytic for F
where
    F: Fn(Complex64) -> ExtendedComplex + Sync,
{
    fn eval(&self, p: Complex64) -> ExtendedComplex {
        self(p)
    }
}

/// Axis-aligned rectangle `[lo.re, hi.re] x [lo.im, hi.im]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchBox {
    pub lo: Complex64,
    pub hi: Complex64,
    pub plane: Plane,
}

impl SearchBox {
    pub fn new(lo: Complex64, hi: Complex64, plane: Plane) -> Result<Self> {
        if !(lo.re < hi.re && lo.im < hi.im) {
            return Err(Error::Domain("box corners must satisfy lo < hi in both coordinates"));
        }
        Ok(Self { lo, hi, plane })
    }

    /// `[x0, x1] x [y0, y1]`.
    pub fn from_bounds(x0: f64, x1: f64, y0: f64, y1: f64, plane: Plane) -> Result<Self> {
        Self::new(Complex64::new(x0, y0), Complex64::new(x1, y1), plane)
    }

    pub fn center(&self) -> Complex64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn width(&self) -> f64 {
        self.hi.re - self.lo.re
    }

    pub fn height(&self) -> f64 {
        self.hi.im - self.lo.im
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn contains(&self, p: Complex64) -> bool {
        p.re >= self.lo.re && p.re <= self.hi.re && p.im >= self.lo.im && p.im <= self.hi.im
    }

    /// Grows each side by `fraction` of its length about the centre.
    pub fn dilate(&self, fraction: f64) -> Self {
        let c = self.center();
        let half = 0.5 * (1.0 + fraction) * (self.hi - self.lo);
        Self { lo: c - half, hi: c + half, plane: self.plane }
    }

    /// Square box of half side `half` about `center`.
    pub fn around(center: Complex64, half: f64, plane: Plane) -> Self {
        let d = Complex64::new(half, half);
        Self { lo: center - d, hi: center + d, plane }
    }

    /// Quarters, cut at `fraction` of the width and height, ordered
    /// lower-left, lower-right, upper-left, upper-right.
    pub fn split(&self, fraction: f64) -> [Self; 4] {
        let mx = self.lo.re + fraction * self.width();
        let my = self.lo.im + fraction * self.height();
        let p = self.plane;
        let b = |x0: f64, x1: f64, y0: f64, y1: f64| Self { lo: Complex64::new(x0, y0), hi: Complex64::new(x1, y1), plane: p };
        [
            b(self.lo.re, mx, self.lo.im, my),
            b(mx, self.hi.re, self.lo.im, my),
            b(self.lo.re, mx, my, self.hi.im),
            b(mx, self.hi.re, my, self.hi.im),
        ]
    }
}

/// Piece of a contour, parametrised over `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
enum Segment {
    Line { a: Complex64, b: Complex64 },
    Arc { center: Complex64, radius: f64, t0: f64, t1: f64 },
}

impl Segment {
    fn at(&self, s: f64) -> Complex64 {
        match *self {
            Segment::Line { a, b } => a + (b - a) * s,
            Segment::Arc { center, radius, t0, t1 } => center + Complex64::from_polar(radius, t0 + (t1 - t0) * s),
        }
    }

    fn length(&self) -> f64 {
        match *self {
            Segment::Line { a, b } => (b - a).norm(),
            Segment::Arc { radius, t0, t1, .. } => radius * (t1 - t0).abs(),
        }
    }
}

/// A positively oriented closed curve.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Contour {
    Rect(SearchBox),
    Circle { center: Complex64, radius: f64 },
    /// `r_inner <= |z| <= r_outer`, `theta_start <= arg z <= theta_end`; a
    /// wedge when `r_inner` is zero.
    AnnularSector { r_inner: f64, r_outer: f64, theta_start: f64, theta_end: f64 },
}

impl Contour {
    fn segments(&self) -> Vec<Segment> {
        match *self {
            Contour::Rect(b) => {
                let c = [b.lo, Complex64::new(b.hi.re, b.lo.im), b.hi, Complex64::new(b.lo.re, b.hi.im)];
                (0..4).map(|i| Segment::Line { a: c[i], b: c[(i + 1) % 4] }).collect()
            }
            Contour::Circle { center, radius } => {
                (0..4).map(|i| Segment::Arc { center, radius, t0: 0.5 * PI * i as f64, t1: 0.5 * PI * (i + 1) as f64 }).collect()
            }
            Contour::AnnularSector { r_inner, r_outer, theta_start, theta_end } => {
                let origin = Complex64::new(0.0, 0.0);
                let outer_start = Complex64::from_polar(r_outer, theta_start);
                let outer_end = Complex64::from_polar(r_outer, theta_end);
                let inner_start = Complex64::from_polar(r_inner, theta_start);
                let inner_end = Complex64::from_polar(r_inner, theta_end);
                let mut segs = vec![
                    Segment::Line { a: inner_start, b: outer_start },
                    Segment::Arc { center: origin, radius: r_outer, t0: theta_start, t1: theta_end },
                    Segment::Line { a: outer_end, b: inner_end },
                ];
                if r_inner > 0.0 {
                    segs.push(Segment::Arc { center: origin, radius: r_inner, t0: theta_end, t1: theta_start });
                }
                segs
            }
        }
    }

    pub fn contains(&self, p: Complex64) -> bool {
        match *self {
            Contour::Rect(b) => b.contains(p),
            Contour::Circle { center, radius } => (p - center).norm() <= radius,
            Contour::AnnularSector { r_inner, r_outer, theta_start, theta_end } => {
                let r = p.norm();
                if r < r_inner || r > r_outer {
                    return false;
                }
                let mut t = p.arg();
                while t < theta_start {
                    t += 2.0 * PI;
                }
                while t > theta_start + 2.0 * PI {
                    t -= 2.0 * PI;
                }
                t <= theta_end
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindingResult {
    pub winding: i64,
    /// Smallest `ln |F|` seen on the contour.
    pub min_log_abs: f64,
    pub samples_used: usize,
}

const MIN_SAMPLES_PER_SEGMENT: usize = 32;
const MAX_SAMPLE_DOUBLINGS: u32 = 6;

const RATE_STEP: f64 = 1e-7;
const MAX_SAMPLES_PER_SEGMENT: usize = 1 << 20;

/// Largest local phase rate (per unit parameter) seen at `n + 1` equally
/// spaced points of `seg`, from a one-sided difference of tiny step.
fn max_phase_rate<F: Analytic + ?Sized>(f: &F, seg: &Segment, n: usize) -> f64 {
    (0..=n)
        .into_par_iter()
        .map(|k| {
            let s = k as f64 / n as f64;
            let (a, b) = if k == n { (s - RATE_STEP, s) } else { (s, s + RATE_STEP) };
            let (fa, fb) = (f.eval(seg.at(a)), f.eval(seg.at(b)));
            if fa.is_zero() || fb.is_zero() {
                return 0.0;
            }
            let d = fb.ratio(&fa).arg();
            if d.is_finite() { d.abs() / RATE_STEP } else { 0.0 }
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .fold(0.0, f64::max)
}

fn trace_once<F: Analytic + ?Sized>(f: &F, segments: &[Segment], per_unit: f64) -> Result<(f64, f64, usize)> {
    let mut trace = PhaseTrace::default();
    for seg in segments {
        let base = MIN_SAMPLES_PER_SEGMENT.max((seg.length() * per_unit).ceil() as usize);
        // a phase turning by a full period between samples would alias, so
        // the spacing is kept below a quarter turn at the fastest point seen
        let by_rate = (max_phase_rate(f, seg, base) / (0.25 * PI)).ceil();
        let initial = if by_rate.is_finite() { base.max(by_rate as usize).min(MAX_SAMPLES_PER_SEGMENT) } else { base };
        let piece = PhaseTrace::for_winding(|s| f.eval(seg.at(s)), 0.0, 1.0, initial)
            .map_err(|e| match e {
                Error::UnresolvedPhase { at } => Error::BoundaryZero { point: seg.at(at) },
                other => other,
            })?;
        trace.extend_with(&piece);
    }
    Ok((trace.total_change(), trace.min_log_abs(), trace.samples.len()))
}

/// Winding number of `f` around `contour`.
///
/// The contour is traced with a base sampling density and again with twice
/// that density; the density keeps doubling until two consecutive traces
/// agree, which guards against phase aliasing for rapidly rotating `f`.
pub fn winding_contour<F: Analytic + ?Sized>(f: &F, contour: &Contour) -> Result<WindingResult> {
    let segments = contour.segments();
    let total_length: f64 = segments.iter().map(Segment::length).sum();
    let mut per_unit = 4.0 * MIN_SAMPLES_PER_SEGMENT as f64 / total_length.max(f64::MIN_POSITIVE);
    let mut samples_used = 0;
    let mut previous: Option<i64> = None;
    for _ in 0..=MAX_SAMPLE_DOUBLINGS {
        let (change, min_log_abs, n) = trace_once(f, &segments, per_unit)?;
        samples_used += n;
        let turns = change / (2.0 * PI);
        let winding = turns.round();
        if (turns - winding).abs() > 1e-6 {
            return Err(Error::BoundaryZero { point: segments[0].at(0.0) });
        }
        let winding = winding as i64;
        if previous == Some(winding) {
            return Ok(WindingResult { winding, min_log_abs, samples_used });
        }
        previous = Some(winding);
        per_unit *= 2.0;
    }
    Err(Error::NoConvergence("winding number changed under every sampling refinement"))
}

/// Winding number around a box. If the boundary passes too close to a zero
/// the box is dilated by 1% and retried, at most five times.
pub fn winding<F: Analytic + ?Sized>(f: &F, search: &SearchBox) -> Result<WindingResult> {
    winding_dilated(f, search).map(|(w, _)| w)
}

/// [`winding`] together with the box actually traced.
pub fn winding_dilated<F: Analytic + ?Sized>(f: &F, search: &SearchBox) -> Result<(WindingResult, SearchBox)> {
    let mut current = *search;
    let mut last = Error::BoundaryZero { point: search.lo };
    for _ in 0..=5 {
        match winding_contour(f, &Contour::Rect(current)) {
            Ok(w) => return Ok((w, current)),
            Err(e @ Error::BoundaryZero { .. }) => {
                last = e;
                current = current.dilate(0.01);
            }
            Err(e) => return Err(e),
        }
    }
    Err(last)
}

/// A certified zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    /// In the plane of the search box.
    pub location: Complex64,
    pub multiplicity: u32,
    /// `ln |F(location)|`.
    pub residual: f64,
    /// Box around `location` whose winding equals `multiplicity`.
    pub enclosing_box: SearchBox,
    pub refine_iterations: u32,
}

impl Resonance {
    pub fn energy(&self) -> Complex64 {
        self.enclosing_box.plane.to_energy(self.location)
    }
}

/// A box at the resolution limit whose winding exceeds the multiplicity cap.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub search_box: SearchBox,
    pub winding: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Isolation {
    /// The box searched, after any dilation of the requested one.
    pub search_box: SearchBox,
    pub resonances: Vec<Resonance>,
    pub clusters: Vec<Cluster>,
}

impl Isolation {
    fn empty(search_box: SearchBox) -> Self {
        Self { search_box, resonances: Vec::new(), clusters: Vec::new() }
    }

    /// Total number of zeros, clusters included.
    pub fn count(&self) -> i64 {
        self.resonances.iter().map(|r| r.multiplicity as i64).sum::<i64>()
            + self.clusters.iter().map(|c| c.winding).sum::<i64>()
    }

    fn append(&mut self, mut other: Isolation) {
        self.resonances.append(&mut other.resonances);
        self.clusters.append(&mut other.clusters);
    }
}

const MAX_DEPTH: u32 = 40;
const MAX_MULTIPLICITY: i64 = 8;
const SPLIT_FRACTIONS: [f64; 5] = [0.5, 0.4875, 0.5125, 0.45, 0.55];

/// Finds every zero of `f` in `search`.
///
/// Boxes are quartered until each has winding at most one and diameter at
/// most `resolution`. Each winding-one box is refined; boxes still holding
/// two to eight zeros at the resolution limit become one multiple
/// [`Resonance`], larger counts are reported as clusters.
pub fn isolate_zeros<F: Analytic + ?Sized>(f: &F, search: &SearchBox, resolution: f64) -> Result<Isolation> {
    if !(resolution > 0.0) {
        return Err(Error::Domain("resolution must be positive"));
    }
    let (top, traced) = winding_dilated(f, search)?;
    let mut out = Isolation::empty(traced);
    let depth_hit = descend(f, traced, top.winding, resolution, 0, &mut out)?;
    if depth_hit {
        return Err(Error::DepthExceeded { partial: out.resonances });
    }
    Ok(out)
}

fn descend<F: Analytic + ?Sized>(
    f: &F,
    node: SearchBox,
    count: i64,
    resolution: f64,
    depth: u32,
    out: &mut Isolation,
) -> Result<bool> {
    if count == 0 {
        return Ok(false);
    }
    if node.diameter() <= resolution {
        if count == 1 {
            out.resonances.push(refine(f, &node, 1)?);
        } else if count <= MAX_MULTIPLICITY {
            out.resonances.push(refine(f, &node, count as u32)?);
        } else {
            out.clusters.push(Cluster { search_box: node, winding: count });
        }
        return Ok(false);
    }
    if depth >= MAX_DEPTH {
        return Ok(true);
    }
    let (children, windings) = split_certified(f, &node, count)?;
    let parts: Vec<Result<(Isolation, bool)>> = children
        .par_iter()
        .zip(windings.par_iter())
        .map(|(child, &w)| {
            let mut local = Isolation::empty(*child);
            let hit = descend(f, *child, w, resolution, depth + 1, &mut local)?;
            Ok((local, hit))
        })
        .collect();
    let mut hit = false;
    for part in parts {
        let (local, h) = part?;
        out.append(local);
        hit |= h;
    }
    Ok(hit)
}

/// Quarters `node` so that the children's windings are resolved and sum to
/// the parent's.
fn split_certified<F: Analytic + ?Sized>(f: &F, node: &SearchBox, count: i64) -> Result<([SearchBox; 4], [i64; 4])> {
    let mut last = Error::BoundaryZero { point: node.center() };
    for fraction in SPLIT_FRACTIONS {
        let children = node.split(fraction);
        let windings: Vec<Result<WindingResult>> =
            children.par_iter().map(|c| winding_contour(f, &Contour::Rect(*c))).collect();
        let mut ws = [0i64; 4];
        let mut failed = false;
        for (slot, w) in ws.iter_mut().zip(windings) {
            match w {
                Ok(w) => *slot = w.winding,
                Err(e @ Error::BoundaryZero { .. }) => {
                    last = e;
                    failed = true;
                }
                Err(e) => return Err(e),
            }
        }
        if failed {
            continue;
        }
        if ws.iter().sum::<i64>() == count {
            return Ok((children, ws));
        }
        last = Error::NoConvergence("child windings do not add up to the parent winding");
    }
    Err(last)
}

/// Muller iteration from inside `node`, then recertification on a small box.
fn refine<F: Analytic + ?Sized>(f: &F, node: &SearchBox, multiplicity: u32) -> Result<Resonance> {
    let c = node.center();
    let half_diag = 0.5 * node.diameter();
    let d = Complex64::from_polar(0.1 * half_diag, 0.3);
    let mut x = [c - d, c + d, c];
    let mut v = x.map(|p| f.eval(p));
    let mut best = (x[2], v[2].log_abs());
    for p in 0..2 {
        if node.contains(x[p]) && v[p].log_abs() < best.1 {
            best = (x[p], v[p].log_abs());
        }
    }
    let mut last_step = half_diag;
    let mut iterations = 0;
    for it in 1..=60 {
        iterations = it;
        if v[2].is_zero() {
            last_step = 0.0;
            break;
        }
        let g0 = v[0].ratio(&v[2]);
        let g1 = v[1].ratio(&v[2]);
        let q = (x[2] - x[1]) / (x[1] - x[0]);
        let a = q * 1.0 - q * (1.0 + q) * g1 + q * q * g0;
        let b = (2.0 * q + 1.0) - (1.0 + q) * (1.0 + q) * g1 + q * q * g0;
        let cc = 1.0 + q;
        let disc = (b * b - 4.0 * a * cc).sqrt();
        let den = if (b + disc).norm() >= (b - disc).norm() { b + disc } else { b - disc };
        let mut step = if den.norm() > 0.0 && den.re.is_finite() && den.im.is_finite() {
            -(x[2] - x[1]) * 2.0 * cc / den
        } else {
            (x[2] - x[1]) * 0.5
        };
        if !(step.re.is_finite() && step.im.is_finite()) {
            step = (x[2] - x[1]) * 0.5;
        }
        if step.norm() > half_diag {
            step *= half_diag / step.norm();
        }
        let next = x[2] + step;
        last_step = step.norm();
        x = [x[1], x[2], next];
        v = [v[1], v[2], f.eval(next)];
        if node.contains(next) && v[2].log_abs() < best.1 {
            best = (next, v[2].log_abs());
        }
        if last_step <= 1e-12 * next.norm().max(node.diameter()) {
            break;
        }
    }
    let location = if node.contains(x[2]) { x[2] } else { best.0 };
    let residual = f.eval(location).log_abs();
    let half = (100.0 * last_step).max(1e-9 * location.norm().max(1.0));
    let small = SearchBox::around(location, half, node.plane);
    let enclosing_box = if half < 0.25 * node.width().min(node.height()) {
        match winding_contour(f, &Contour::Rect(small)) {
            Ok(w) if w.winding == multiplicity as i64 => small,
            _ => *node,
        }
    } else {
        *node
    };
    Ok(Resonance { location, multiplicity, residual, enclosing_box, refine_iterations: iterations })
}

/// Recomputes the winding around the reported box.
pub fn recertify<F: Analytic + ?Sized>(f: &F, resonance: &Resonance) -> Result<bool> {
    Ok(winding(f, &resonance.enclosing_box)?.winding == resonance.multiplicity as i64)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ZeroFreeReport {
    pub contours_checked: usize,
    pub samples_used: usize,
    /// Contours with nonzero winding.
    pub violations: Vec<(Contour, i64)>,
}

impl ZeroFreeReport {
    pub fn is_zero_free(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Winding of `f` around each contour of a cover; any nonzero winding is a
/// violation.
pub fn verify_zero_free<F: Analytic + ?Sized>(f: &F, cover: &[Contour]) -> Result<ZeroFreeReport> {
    let results: Vec<Result<WindingResult>> = cover.par_iter().map(|c| winding_contour(f, c)).collect();
    let mut report = ZeroFreeReport::default();
    for (c, r) in cover.iter().zip(results) {
        let r = r?;
        report.contours_checked += 1;
        report.samples_used += r.samples_used;
        if r.winding != 0 {
            report.violations.push((*c, r.winding));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(roots: Vec<Complex64>) -> impl Fn(Complex64) -> ExtendedComplex + Sync {
        move |z| {
            let mut acc = ExtendedComplex::from(1.0);
            for r in &roots {
                acc = acc * (z - r);
            }
            acc
        }
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn winding_of_quadratic() {
        let f = poly(vec![c(0.0, 1.0), c(0.0, -1.0)]);
        let b = SearchBox::from_bounds(-2.0, 2.0, -2.0, 2.0, Plane::Z).unwrap();
        assert_eq!(winding(&f, &b).unwrap().winding, 2);
        let b = SearchBox::from_bounds(-2.0, 2.0, 0.5, 2.0, Plane::Z).unwrap();
        assert_eq!(winding(&f, &b).unwrap().winding, 1);
    }

    #[test]
    fn other_contours() {
        let f = poly(vec![c(0.5, -0.5), c(3.0, 0.0)]);
        assert_eq!(winding_contour(&f, &Contour::Circle { center: c(0.0, 0.0), radius: 1.0 }).unwrap().winding, 1);
        let sector = Contour::AnnularSector { r_inner: 0.5, r_outer: 1.0, theta_start: -PI / 2.0, theta_end: 0.0 };
        assert_eq!(winding_contour(&f, &sector).unwrap().winding, 1);
        assert!(sector.contains(c(0.5, -0.5)));
        let wedge = Contour::AnnularSector { r_inner: 0.0, r_outer: 4.0, theta_start: -0.1, theta_end: 0.1 };
        assert_eq!(winding_contour(&f, &wedge).unwrap().winding, 1);
    }

    #[test]
    fn boundary_zero_is_dodged() {
        let f = poly(vec![c(1.0, 0.0)]);
        let b = SearchBox::from_bounds(-1.0, 1.0, -1.0, 1.0, Plane::Z).unwrap();
        assert_eq!(winding(&f, &b).unwrap().winding, 1);
        assert!(matches!(winding_contour(&f, &Contour::Rect(b)), Err(Error::BoundaryZero { .. })));
    }

    #[test]
    fn aliasing_is_caught() {
        // exp(i 400 z) has no zeros but rotates fast along the real direction
        let f = |z: Complex64| ExtendedComplex::exp(Complex64::new(0.0, 400.0) * z) * (z - c(0.3, 0.2));
        let b = SearchBox::from_bounds(0.0, 1.0, 0.0, 1.0, Plane::Z).unwrap();
        assert_eq!(winding(&f, &b).unwrap().winding, 1);
    }

    #[test]
    fn close_pair_is_separated() {
        let f = |z: Complex64| ExtendedComplex::from(z * z + 1e-6);
        let b = SearchBox::from_bounds(-1.0, 1.0, -1.0, 1.0, Plane::Z).unwrap();
        let iso = isolate_zeros(&f, &b, 1e-4).unwrap();
        assert_eq!(iso.resonances.len(), 2);
        for r in &iso.resonances {
            assert_eq!(r.multiplicity, 1);
            assert!((r.location.norm() - 1e-3).abs() < 1e-12);
            assert!(recertify(&f, r).unwrap());
        }
    }

    #[test]
    fn double_zero_is_one_resonance() {
        let f = |z: Complex64| ExtendedComplex::from(z * z);
        let b = SearchBox::from_bounds(-1.0, 1.1, -1.0, 1.1, Plane::Z).unwrap();
        let iso = isolate_zeros(&f, &b, 1e-3).unwrap();
        assert_eq!(iso.resonances.len(), 1);
        assert_eq!(iso.resonances[0].multiplicity, 2);
        assert!(iso.resonances[0].location.norm() < 1e-4);
    }

    #[test]
    fn additivity_and_stable_refinement() {
        let roots = vec![c(0.2, -0.3), c(-0.6, 0.1), c(0.7, 0.65), c(-0.1, -0.8)];
        let f = poly(roots.clone());
        let b = SearchBox::from_bounds(-1.0, 1.0, -1.0, 1.0, Plane::Z).unwrap();
        let parent = winding(&f, &b).unwrap().winding;
        for frac in [0.5, 0.37, 0.61] {
            let sum: i64 = b.split(frac).iter().map(|ch| winding(&f, ch).unwrap().winding).sum();
            assert_eq!(sum, parent);
        }
        let iso = isolate_zeros(&f, &b, 0.05).unwrap();
        assert_eq!(iso.count(), 4);
        for r in &iso.resonances {
            let nearest = roots.iter().map(|z| (z - r.location).norm()).fold(f64::INFINITY, f64::min);
            assert!(nearest < 1e-10);
        }
    }

    #[test]
    fn zero_free_report() {
        let f = poly(vec![c(0.0, -0.5)]);
        let cover = [
            Contour::Rect(SearchBox::from_bounds(-1.0, 1.0, 0.0, 1.0, Plane::Z).unwrap()),
            Contour::Rect(SearchBox::from_bounds(-1.0, 1.0, -1.0, -0.1, Plane::Z).unwrap()),
        ];
        let report = verify_zero_free(&f, &cover).unwrap();
        assert_eq!(report.contours_checked, 2);
        assert_eq!(report.violations.len(), 1);
        assert!(!report.is_zero_free());
    }

    #[test]
    fn bad_inputs() {
        assert!(SearchBox::from_bounds(1.0, 0.0, 0.0, 1.0, Plane::Z).is_err());
        let f = |z: Complex64| ExtendedComplex::from(z);
        let b = SearchBox::from_bounds(-1.0, 1.0, -1.0, 1.0, Plane::Z).unwrap();
        assert!(isolate_zeros(&f, &b, 0.0).is_err());
    }
}
