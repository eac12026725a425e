//! Green's functions of the two-barrier models, spectral densities of well
//! states and their survival amplitudes.
//!
//! Inner products are taken over `[-kappa, kappa]` only; states are real and
//! supported there. Spectral densities are boundary values of
//! `Im <phi, G_z phi> / pi` obtained from three small `Im z` by Richardson
//! extrapolation.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::determinants::{stark_solutions, ModelSpec, Variant};
use crate::error::{Error, Result};
use crate::numerics::{gauss_legendre, ExtendedComplex};
use crate::shape::shape_root;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Eigenpair of the Dirichlet well `[-kappa, kappa]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WellEigenpair {
    pub n: u32,
    pub kappa: f64,
}

impl WellEigenpair {
    pub fn new(n: u32, kappa: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("well eigenpairs are numbered from 1"));
        }
        if !(kappa > 0.0) {
            return Err(Error::Domain("well half width must be positive"));
        }
        Ok(Self { n, kappa })
    }

    fn wavenumber(&self) -> f64 {
        self.n as f64 * PI / (2.0 * self.kappa)
    }

    /// `(n pi / 2 kappa)^2`.
    pub fn energy(&self) -> f64 {
        self.wavenumber().powi(2)
    }

    /// `kappa^(-1/2) sin(n pi (x + kappa) / 2 kappa)`, zero outside the well.
    pub fn eval(&self, x: f64) -> f64 {
        if x.abs() > self.kappa {
            return 0.0;
        }
        (self.wavenumber() * (x + self.kappa)).sin() / self.kappa.sqrt()
    }
}

/// A real finite combination of well eigenfunctions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WellState {
    pub kappa: f64,
    /// `(n, c_n)`, each `n` at most once.
    pub components: Vec<(u32, f64)>,
}

impl WellState {
    pub fn new(kappa: f64, components: Vec<(u32, f64)>) -> Result<Self> {
        let mut seen: Vec<u32> = components.iter().map(|c| c.0).collect();
        seen.sort_unstable();
        if seen.windows(2).any(|p| p[0] == p[1]) {
            return Err(Error::Domain("each eigenfunction may appear once in a state"));
        }
        for &(n, _) in &components {
            WellEigenpair::new(n, kappa)?;
        }
        Ok(Self { kappa, components })
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.components.iter().map(|&(n, c)| c * WellEigenpair { n, kappa: self.kappa }.eval(x)).sum()
    }

    /// `<phi_n, self>`, exact by orthonormality.
    pub fn overlap(&self, n: u32) -> f64 {
        self.components.iter().find(|c| c.0 == n).map_or(0.0, |c| c.1)
    }

    pub fn norm_squared(&self) -> f64 {
        self.components.iter().map(|c| c.1 * c.1).sum()
    }
}

impl From<WellEigenpair> for WellState {
    fn from(p: WellEigenpair) -> Self {
        Self { kappa: p.kappa, components: vec![(p.n, 1.0)] }
    }
}

/// Smooth cutoff equal to 1 on `[a, b]`, 0 outside `[a - delta, b + delta]`,
/// with quintic smoothstep shoulders.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyWindow {
    pub a: f64,
    pub b: f64,
    pub delta: f64,
}

fn smoothstep(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    u * u * u * (10.0 - 15.0 * u + 6.0 * u * u)
}

impl EnergyWindow {
    pub fn new(a: f64, b: f64, delta: f64) -> Result<Self> {
        if !(a > 0.0 && b > a && delta > 0.0) {
            return Err(Error::Domain("window needs 0 < a < b and delta > 0"));
        }
        Ok(Self { a, b, delta })
    }

    pub fn chi(&self, lambda: f64) -> f64 {
        if lambda < self.a {
            smoothstep((lambda - (self.a - self.delta)) / self.delta)
        } else if lambda > self.b {
            smoothstep((self.b + self.delta - lambda) / self.delta)
        } else {
            1.0
        }
    }

    pub fn support(&self) -> (f64, f64) {
        (self.a - self.delta, self.b + self.delta)
    }
}

/// Unperturbed left and right solutions, each divided by its value at
/// `x = 0` so that nothing overflows on the well.
#[derive(Clone, Copy, Debug)]
enum Solutions {
    Plane { k: Complex64 },
    Wall { k: Complex64, l: f64, at_zero: Complex64 },
    Airy { spec: ModelSpec, z: Complex64, psi0: ExtendedComplex, phi0: ExtendedComplex },
}

impl Solutions {
    fn new(spec: &ModelSpec, z: Complex64) -> Result<(Self, Complex64)> {
        match spec.variant {
            Variant::Free => {
                let k = z.sqrt();
                if k.norm() == 0.0 {
                    return Err(Error::Pole);
                }
                Ok((Self::Plane { k }, -2.0 * I * k))
            }
            Variant::Dirichlet { l } => {
                let k = z.sqrt();
                let at_zero = (-l * k).sin();
                if k.norm() == 0.0 || at_zero.norm() == 0.0 {
                    return Err(Error::Pole);
                }
                // psi' phi - phi' psi = -k e^(-i l k), rescaled by phi(0)
                Ok((Self::Wall { k, l, at_zero }, -k * (-I * l * k).exp() / at_zero))
            }
            Variant::Stark { .. } => {
                let (psi0, dpsi0, phi0, dphi0) = stark_solutions(spec, z, 0.0)?;
                if psi0.is_zero() || phi0.is_zero() {
                    return Err(Error::Pole);
                }
                let w = dpsi0.ratio(&psi0) - dphi0.ratio(&phi0);
                Ok((Self::Airy { spec: *spec, z, psi0, phi0 }, w))
            }
        }
    }

    /// `(psi(x), phi(x))`.
    fn at(&self, x: f64) -> (Complex64, Complex64) {
        match *self {
            Self::Plane { k } => ((-I * k * x).exp(), (I * k * x).exp()),
            Self::Wall { k, l, at_zero } => ((-I * k * x).exp(), ((x - l) * k).sin() / at_zero),
            Self::Airy { spec, z, psi0, phi0 } => {
                let (psi, _, phi, _) = stark_solutions(&spec, z, x).expect("spec checked at construction");
                (psi.ratio(&psi0), phi.ratio(&phi0))
            }
        }
    }
}

/// Barrier data shared by the kernel and the inner products.
struct Assembled {
    sol: Solutions,
    w: Complex64,
    psi_minus: Complex64,
    phi_plus: Complex64,
    alpha_plus: Complex64,
    alpha_minus: Complex64,
    beta_plus: Complex64,
    det: Complex64,
}

impl Assembled {
    fn new(spec: &ModelSpec, z: Complex64) -> Result<Self> {
        let (sol, w) = Solutions::new(spec, z)?;
        let k = spec.kappa;
        let (psi_p, phi_p) = sol.at(k);
        let (psi_m, phi_m) = sol.at(-k);
        let alpha_plus = psi_p * phi_p;
        let alpha_minus = psi_m * phi_m;
        let beta_plus = psi_m * phi_p;
        let ew = spec.eta * w;
        let det = 1.0 + (alpha_plus + alpha_minus) / ew + (alpha_plus * alpha_minus - beta_plus * beta_plus) / (ew * ew);
        if !(det.norm() > 0.0) || !det.is_finite() {
            return Err(Error::Pole);
        }
        Ok(Self { sol, w, psi_minus: psi_m, phi_plus: phi_p, alpha_plus, alpha_minus, beta_plus, det })
    }

    fn free_kernel(&self, x: f64, y: f64) -> Complex64 {
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        self.sol.at(lo).0 * self.sol.at(hi).1 / self.w
    }

    /// `g^T M g / (eta^2 W D)` for barrier vectors `g = (g_+, g_-)` and
    /// `h = (h_+, h_-)`.
    fn correction(&self, eta: f64, g: (Complex64, Complex64), h: (Complex64, Complex64)) -> Complex64 {
        let ew = eta * self.w;
        let m = [[ew + self.alpha_minus, -self.beta_plus], [-self.beta_plus, ew + self.alpha_plus]];
        let quad = g.0 * (m[0][0] * h.0 + m[0][1] * h.1) + g.1 * (m[1][0] * h.0 + m[1][1] * h.1);
        quad / (eta * eta * self.w * self.det)
    }
}

/// Resolvent kernel `(H - z)^(-1)(x, y)` of the coupled model.
///
/// For the free and Dirichlet models `sqrt z` is taken on the principal
/// branch, which continues the physical sheet through the positive real axis
/// when `Im z < 0`. The Stark kernel is entire in `z`. A zero of the
/// determinant is reported as [`Error::Pole`].
pub fn greens_kernel(spec: &ModelSpec, z: Complex64, x: f64, y: f64) -> Result<ExtendedComplex> {
    if let Some(l) = spec.wall() {
        if x >= l || y >= l {
            return Err(Error::Domain("points must lie left of the wall"));
        }
    }
    let asm = Assembled::new(spec, z)?;
    let k = spec.kappa;
    let g = |p: f64| (asm.free_kernel(k, p), asm.free_kernel(-k, p));
    let value = asm.free_kernel(x, y) - asm.correction(spec.eta, g(x), g(y));
    Ok(ExtendedComplex::from(value))
}

/// Kernel with the barriers removed.
pub fn greens_kernel_unperturbed(spec: &ModelSpec, z: Complex64, x: f64, y: f64) -> Result<ExtendedComplex> {
    let (sol, w) = Solutions::new(spec, z)?;
    let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
    Ok(ExtendedComplex::from(sol.at(lo).0 * sol.at(hi).1 / w))
}

const PANELS: usize = 8;
const PANEL_NODES: usize = 16;

/// Gauss-Legendre rule on `[-1, 1]` with its cumulative integration matrix:
/// `cumulative[j][k]` integrates the `k`-th Lagrange basis polynomial from
/// `-1` to node `j`.
struct PanelRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    cumulative: Vec<Vec<f64>>,
}

fn legendre_all(n: usize, x: f64) -> Vec<f64> {
    let mut p = vec![1.0, x];
    for m in 1..n {
        let next = ((2 * m + 1) as f64 * x * p[m] - m as f64 * p[m - 1]) / (m + 1) as f64;
        p.push(next);
    }
    p.truncate(n + 1);
    p
}

impl PanelRule {
    fn new(n: usize) -> Self {
        let (nodes, weights) = gauss_legendre(n);
        let p_nodes: Vec<Vec<f64>> = nodes.iter().map(|&x| legendre_all(n, x)).collect();
        let cumulative = nodes
            .iter()
            .map(|&xj| {
                let p = legendre_all(n, xj);
                let integral = |m: usize| if m == 0 { xj + 1.0 } else { (p[m + 1] - p[m - 1]) / (2 * m + 1) as f64 };
                (0..n)
                    .map(|k| weights[k] * (0..n).map(|m| 0.5 * (2 * m + 1) as f64 * p_nodes[k][m] * integral(m)).sum::<f64>())
                    .collect()
            })
            .collect();
        Self { nodes, weights, cumulative }
    }
}

fn panel_rule() -> &'static PanelRule {
    static RULE: std::sync::OnceLock<PanelRule> = std::sync::OnceLock::new();
    RULE.get_or_init(|| PanelRule::new(PANEL_NODES))
}

/// `(P, Q, T)` with `P = int psi phi`, `Q = int phi_R phi` and
/// `T = int_{x < y} psi(x) phi(x) phi_R(y) phi(y)` over the well.
fn well_integrals(sol: &Solutions, kappa: f64, state: &WellState) -> (Complex64, Complex64, Complex64) {
    let rule = panel_rule();
    let h = 2.0 * kappa / PANELS as f64;
    let half = 0.5 * h;
    let (mut p, mut q, mut t) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
    let mut running = Complex64::new(0.0, 0.0);
    for panel in 0..PANELS {
        let mid = -kappa + (panel as f64 + 0.5) * h;
        let vals: Vec<(Complex64, Complex64)> = rule
            .nodes
            .iter()
            .map(|&u| {
                let x = mid + half * u;
                let s = state.eval(x);
                let (psi, phi) = sol.at(x);
                (psi * s, phi * s)
            })
            .collect();
        for j in 0..PANEL_NODES {
            let inner: Complex64 = (0..PANEL_NODES).map(|k| vals[k].0 * rule.cumulative[j][k]).sum::<Complex64>() * half;
            t += rule.weights[j] * half * vals[j].1 * (running + inner);
        }
        let panel_p: Complex64 = (0..PANEL_NODES).map(|k| vals[k].0 * rule.weights[k]).sum::<Complex64>() * half;
        p += panel_p;
        q += (0..PANEL_NODES).map(|k| vals[k].1 * rule.weights[k]).sum::<Complex64>() * half;
        running += panel_p;
    }
    (p, q, t)
}

/// `(e^w - 1) / w`, accurate near `w = 0`.
fn exprel(w: Complex64) -> Complex64 {
    if w.norm() < 0.5 {
        let mut term = Complex64::new(1.0, 0.0);
        let mut sum = term;
        for k in 2..30 {
            term *= w / k as f64;
            sum += term;
        }
        sum
    } else {
        (w.exp() - 1.0) / w
    }
}

/// Closed forms of `int e^(-ikx) phi` and `int e^(ikx) phi` for the free
/// model.
fn free_overlaps(k: Complex64, state: &WellState) -> (Complex64, Complex64) {
    let kappa = state.kappa;
    let len = 2.0 * kappa;
    // int_0^L e^(i g u) du
    let e = |g: Complex64| len * exprel(I * g * len);
    let mut p = Complex64::new(0.0, 0.0);
    let mut q = Complex64::new(0.0, 0.0);
    for &(n, c) in &state.components {
        let a = n as f64 * PI / len;
        let scale = c / kappa.sqrt() / (2.0 * I);
        p += scale * (I * k * kappa).exp() * (e(a - k) - e(-(a + k)));
        q += scale * (-I * k * kappa).exp() * (e(a + k) - e(k - a));
    }
    (p, q)
}

/// `<phi, G_z phi>` for a real well state.
pub fn state_resolvent(spec: &ModelSpec, state: &WellState, z: Complex64) -> Result<Complex64> {
    if (state.kappa - spec.kappa).abs() > 1e-12 * spec.kappa {
        return Err(Error::Domain("state and model must share the well"));
    }
    let asm = Assembled::new(spec, z)?;
    let (mut p, mut q, t) = well_integrals(&asm.sol, spec.kappa, state);
    if let Solutions::Plane { k } = asm.sol {
        (p, q) = free_overlaps(k, state);
    }
    let a_plus = asm.phi_plus * p / asm.w;
    let a_minus = asm.psi_minus * q / asm.w;
    Ok(2.0 * t / asm.w - asm.correction(spec.eta, (a_plus, a_minus), (a_plus, a_minus)))
}

/// Quadrature-only version of the free-model overlaps, for cross-checks.
#[doc(hidden)]
pub fn free_overlaps_by_quadrature(k: Complex64, state: &WellState) -> (Complex64, Complex64) {
    let (p, q, _) = well_integrals(&Solutions::Plane { k }, state.kappa, state);
    (p, q)
}

#[doc(hidden)]
pub fn free_overlaps_closed(k: Complex64, state: &WellState) -> (Complex64, Complex64) {
    free_overlaps(k, state)
}

const RICHARDSON_OFFSETS: [f64; 3] = [1e-4, 1e-5, 1e-6];

/// `Im <phi, G_(lambda + i mu) phi> / pi` extrapolated to `mu = 0` from
/// `mu = {1e-4, 1e-5, 1e-6} max(1, lambda)`.
pub fn spectral_density(spec: &ModelSpec, state: &WellState, lambda: f64) -> Result<f64> {
    let scale = lambda.abs().max(1.0);
    let mut r = [0.0; 3];
    for (slot, mu) in r.iter_mut().zip(RICHARDSON_OFFSETS) {
        *slot = state_resolvent(spec, state, Complex64::new(lambda, mu * scale))?.im / PI;
    }
    // errors are analytic in mu; eliminate the linear and quadratic terms
    let r1 = (10.0 * r[1] - r[0]) / 9.0;
    let r2 = (10.0 * r[2] - r[1]) / 9.0;
    Ok((100.0 * r2 - r1) / 99.0)
}

/// Spectral density sampled on Gauss-Legendre panels over the support of a
/// window, refined until each panel's integral of `chi rho` is stable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralTable {
    pub lambda: Vec<f64>,
    /// Quadrature weight times `chi(lambda)`.
    pub weight: Vec<f64>,
    pub density: Vec<f64>,
}

const TABLE_NODES: usize = 16;
const TABLE_MAX_DEPTH: u32 = 24;
const TABLE_ABS_TOL: f64 = 1e-9;
const TABLE_REL_TOL: f64 = 1e-7;

struct TablePanel {
    lambda: Vec<f64>,
    weight: Vec<f64>,
    density: Vec<f64>,
    integral: f64,
}

fn table_panel(spec: &ModelSpec, state: &WellState, window: &EnergyWindow, a: f64, b: f64) -> Result<TablePanel> {
    let (x, w) = gauss_legendre(TABLE_NODES);
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut out = TablePanel { lambda: Vec::new(), weight: Vec::new(), density: Vec::new(), integral: 0.0 };
    for (u, wu) in x.iter().zip(&w) {
        let l = mid + half * u;
        let rho = spectral_density(spec, state, l)?;
        let wt = wu * half * window.chi(l);
        out.integral += wt * rho;
        out.lambda.push(l);
        out.weight.push(wt);
        out.density.push(rho);
    }
    Ok(out)
}

fn refine_panel(
    spec: &ModelSpec,
    state: &WellState,
    window: &EnergyWindow,
    a: f64,
    b: f64,
    whole: TablePanel,
    depth: u32,
) -> Result<TablePanel> {
    let m = 0.5 * (a + b);
    let left = table_panel(spec, state, window, a, m)?;
    let right = table_panel(spec, state, window, m, b)?;
    let halves = left.integral + right.integral;
    if (halves - whole.integral).abs() <= TABLE_ABS_TOL.max(TABLE_REL_TOL * halves.abs()) || depth >= TABLE_MAX_DEPTH {
        let mut merged = left;
        merged.lambda.extend(right.lambda);
        merged.weight.extend(right.weight);
        merged.density.extend(right.density);
        merged.integral = halves;
        return Ok(merged);
    }
    let mut l = refine_panel(spec, state, window, a, m, left, depth + 1)?;
    let r = refine_panel(spec, state, window, m, b, right, depth + 1)?;
    l.lambda.extend(r.lambda);
    l.weight.extend(r.weight);
    l.density.extend(r.density);
    l.integral += r.integral;
    Ok(l)
}

impl SpectralTable {
    /// Panels are never wider than `pi / (10 t_max)`, so `e^(-i lambda t)`
    /// is resolved for every `t <= t_max`.
    pub fn build(spec: &ModelSpec, state: &WellState, window: &EnergyWindow, t_max: f64) -> Result<Self> {
        let (lo, hi) = window.support();
        let width = hi - lo;
        let mut cap = width / 32.0;
        if t_max > 0.0 {
            cap = cap.min(PI / (10.0 * t_max));
        }
        let count = (width / cap).ceil() as usize;
        let h = width / count as f64;
        let panels: Vec<Result<TablePanel>> = (0..count)
            .into_par_iter()
            .map(|i| {
                let (a, b) = (lo + i as f64 * h, lo + (i + 1) as f64 * h);
                let whole = table_panel(spec, state, window, a, b)?;
                refine_panel(spec, state, window, a, b, whole, 0)
            })
            .collect();
        let mut table = Self { lambda: Vec::new(), weight: Vec::new(), density: Vec::new() };
        for p in panels {
            let p = p?;
            table.lambda.extend(p.lambda);
            table.weight.extend(p.weight);
            table.density.extend(p.density);
        }
        Ok(table)
    }

    /// `int chi(lambda) e^(-i lambda t) rho(lambda) d lambda`.
    pub fn amplitude(&self, t: f64) -> Complex64 {
        self.lambda
            .iter()
            .zip(&self.weight)
            .zip(&self.density)
            .map(|((l, w), r)| w * r * Complex64::from_polar(1.0, -l * t))
            .sum()
    }

    /// `<phi, chi(H) phi>`.
    pub fn mass(&self) -> f64 {
        self.weight.iter().zip(&self.density).map(|(w, r)| w * r).sum()
    }

    pub fn min_density(&self) -> f64 {
        self.density.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// `<phi, e^(-itH) chi(H) phi>` at each time.
pub fn survival_exact(spec: &ModelSpec, state: &WellState, window: &EnergyWindow, times: &[f64]) -> Result<Vec<Complex64>> {
    let t_max = times.iter().copied().fold(0.0, f64::max);
    let table = SpectralTable::build(spec, state, window, t_max)?;
    Ok(times.par_iter().map(|&t| table.amplitude(t)).collect())
}

/// Resonance `z_n = w^2` continuing the well eigenvalue `E_n` of a free
/// model.
pub fn shape_resonance_energy(spec: &ModelSpec, n: u32) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::Domain("well eigenvalues are numbered from 1"));
    }
    let root = shape_root(n as usize - 1, &spec.without_field())?;
    Ok(root.w * root.w)
}

/// `ln 2 / |Im z|`.
pub fn half_life(z: Complex64) -> f64 {
    std::f64::consts::LN_2 / z.im.abs()
}

/// `sum_j |<phi, phi_j>|^2 e^(-i t z_j)` over well eigenvalues inside the
/// window's support.
pub fn survival_resonance_sum(spec: &ModelSpec, state: &WellState, window: &EnergyWindow, times: &[f64]) -> Result<Vec<Complex64>> {
    if !matches!(spec.variant, Variant::Free) {
        return Err(Error::InvalidModel("the resonance sum is defined for the free model".into()));
    }
    let (lo, hi) = window.support();
    let mut terms = Vec::new();
    let mut n = 1u32;
    loop {
        let e = WellEigenpair { n, kappa: spec.kappa }.energy();
        if e >= hi {
            break;
        }
        if e > lo {
            let c = state.overlap(n);
            if c != 0.0 {
                terms.push((c * c, shape_resonance_energy(spec, n)?));
            }
        }
        n += 1;
    }
    Ok(times
        .iter()
        .map(|&t| terms.iter().map(|&(wt, z)| wt * (-I * z * t).exp()).sum())
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurvivalSeries {
    pub model: ModelSpec,
    pub times: Vec<f64>,
    pub exact: Vec<Complex64>,
    pub resonance_sum: Vec<Complex64>,
}

impl SurvivalSeries {
    pub fn compute(spec: &ModelSpec, state: &WellState, window: &EnergyWindow, times: &[f64]) -> Result<Self> {
        Ok(Self {
            model: *spec,
            times: times.to_vec(),
            exact: survival_exact(spec, state, window, times)?,
            resonance_sum: survival_resonance_sum(spec, state, window, times)?,
        })
    }

    pub fn sup_difference(&self) -> f64 {
        self.exact.iter().zip(&self.resonance_sum).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub field: f64,
    pub times: Vec<f64>,
    pub free: Vec<Complex64>,
    pub stark: Vec<Complex64>,
    pub sup_difference: f64,
    /// `|stark(0) - free(0)| / |free(0)|`.
    pub initial_relative_difference: f64,
}

/// Survival amplitudes of the same state and window with and without a
/// field `f`. At `f = 0` both series are the free one.
pub fn small_field_stability(
    spec_free: &ModelSpec,
    f: f64,
    state: &WellState,
    window: &EnergyWindow,
    times: &[f64],
) -> Result<StabilityReport> {
    if !(f >= 0.0) {
        return Err(Error::Domain("field strength must be non-negative"));
    }
    let base = spec_free.without_field();
    let free = survival_exact(&base, state, window, times)?;
    let stark = if f == 0.0 {
        free.clone()
    } else {
        survival_exact(&ModelSpec::stark(base.kappa, base.eta, f)?, state, window, times)?
    };
    let sup_difference = free.iter().zip(&stark).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
    let initial_relative_difference = match (free.first(), stark.first()) {
        (Some(a), Some(b)) if a.norm() > 0.0 => (a - b).norm() / a.norm(),
        _ => 0.0,
    };
    Ok(StabilityReport { field: f, times: times.to_vec(), free, stark, sup_difference, initial_relative_difference })
}

/// `-(1 / 2 pi i)` times the contour integral of `<phi, G_z phi>` over the
/// circle `|z - center| = radius`; near an isolated simple pole of the
/// continued resolvent this is the weight multiplying `e^(-itz)`.
pub fn resolvent_residue(spec: &ModelSpec, state: &WellState, center: Complex64, radius: f64) -> Result<Complex64> {
    const N: usize = 256;
    let mut sum = Complex64::new(0.0, 0.0);
    for j in 0..N {
        let e = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / N as f64);
        // dz = i r e dtheta, so the i cancels against 1 / (2 pi i)
        sum += state_resolvent(spec, state, center + radius * e)? * radius * e;
    }
    Ok(-sum / N as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate;
    use proptest::prelude::*;

    fn quad_real<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
        integrate(|x| Complex64::new(f(x), 0.0), a, b).unwrap().re
    }

    #[test]
    fn eigenpairs_orthonormal() {
        for n in 1..=6 {
            for m in 1..=6 {
                let (p, q) = (WellEigenpair::new(n, 1.3).unwrap(), WellEigenpair::new(m, 1.3).unwrap());
                let ip = quad_real(|x| p.eval(x) * q.eval(x), -1.3, 1.3);
                let expected = if n == m { 1.0 } else { 0.0 };
                assert!((ip - expected).abs() < 1e-10, "{n} {m} {ip}");
            }
        }
        assert!(WellEigenpair::new(0, 1.0).is_err());
    }

    #[test]
    fn parseval_for_combinations() {
        let s = WellState::new(1.0, vec![(1, 0.6), (3, -0.3), (4, 0.2)]).unwrap();
        let norm = quad_real(|x| s.eval(x).powi(2), -1.0, 1.0);
        assert!((norm - s.norm_squared()).abs() < 1e-8);
        let back = quad_real(|x| s.eval(x) * WellEigenpair { n: 3, kappa: 1.0 }.eval(x), -1.0, 1.0);
        assert!((back - s.overlap(3)).abs() < 1e-10);
        assert!(WellState::new(1.0, vec![(2, 1.0), (2, 0.5)]).is_err());
    }

    #[test]
    fn window_shape() {
        let w = EnergyWindow::new(1.0, 2.0, 0.5).unwrap();
        assert_eq!(w.chi(1.5), 1.0);
        assert_eq!(w.chi(0.4), 0.0);
        assert_eq!(w.chi(2.6), 0.0);
        assert!((w.chi(0.75) - 0.5).abs() < 1e-15);
        let mut prev = 0.0;
        for i in 0..=100 {
            let v = w.chi(0.5 + 0.005 * i as f64);
            assert!(v >= prev && (0.0..=1.0).contains(&v));
            prev = v;
        }
        assert!(EnergyWindow::new(2.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn free_kernel_is_outgoing_wave() {
        let spec = ModelSpec::free(1.0, 0.5).unwrap();
        let z = Complex64::new(2.0, 0.3);
        let k = z.sqrt();
        let g = greens_kernel_unperturbed(&spec, z, 0.3, -1.1).unwrap().to_complex();
        let expected = I * (I * k * 1.4).exp() / (2.0 * k);
        assert!((g - expected).norm() < 1e-14);
    }

    fn resolvent_residual(spec: &ModelSpec, z: Complex64, x: f64, y: f64) -> f64 {
        let k = spec.kappa;
        let g0 = |a: f64, b: f64| greens_kernel_unperturbed(spec, z, a, b).unwrap().to_complex();
        let g1 = |a: f64, b: f64| greens_kernel(spec, z, a, b).unwrap().to_complex();
        let rhs = g1(x, y) + (g0(x, k) * g1(k, y) + g0(x, -k) * g1(-k, y)) / spec.eta;
        (g0(x, y) - rhs).norm() / g0(x, y).norm().max(1e-3)
    }

    #[test]
    fn second_resolvent_identity_all_models() {
        let specs = [
            ModelSpec::free(1.0, 0.4).unwrap(),
            ModelSpec::dirichlet(1.0, 0.7, 5.0).unwrap(),
            ModelSpec::stark(1.0, 1.0, 0.3).unwrap(),
        ];
        for spec in specs {
            for (z, x, y) in [(Complex64::new(1.5, 0.2), 0.3, -0.4), (Complex64::new(3.0, 1.0), -1.5, 1.2), (Complex64::new(0.5, 0.01), 0.9, 2.0)] {
                assert!(resolvent_residual(&spec, z, x, y) < 1e-8, "{spec:?} {z}");
                let a = greens_kernel(&spec, z, x, y).unwrap().to_complex();
                let b = greens_kernel(&spec, z, y, x).unwrap().to_complex();
                assert!((a - b).norm() <= 1e-12 * a.norm());
            }
        }
    }

    #[test]
    fn weak_coupling_limit() {
        let spec = ModelSpec::free(1.0, 1e9).unwrap();
        let z = Complex64::new(2.0, 0.5);
        let a = greens_kernel(&spec, z, 0.2, 0.7).unwrap().to_complex();
        let b = greens_kernel_unperturbed(&spec, z, 0.2, 0.7).unwrap().to_complex();
        assert!((a - b).norm() < 1e-8);
    }

    #[test]
    fn small_field_kernel_near_free() {
        let z = Complex64::new(2.0, 0.5);
        let free = greens_kernel(&ModelSpec::free(1.0, 1.0).unwrap(), z, 0.2, -0.6).unwrap().to_complex();
        let mut last = f64::INFINITY;
        for f in [1e-1, 1e-2, 1e-3] {
            let stark = greens_kernel(&ModelSpec::stark(1.0, 1.0, f).unwrap(), z, 0.2, -0.6).unwrap().to_complex();
            let d = (stark - free).norm();
            assert!(d < last);
            last = d;
        }
        assert!(last < 1e-2 * free.norm());
    }

    #[test]
    fn closed_form_overlaps_match_quadrature() {
        let s = WellState::new(1.0, vec![(1, 0.8), (2, -0.6)]).unwrap();
        for k in [Complex64::new(std::f64::consts::FRAC_PI_2 - 2.7e-8, 1e-6), Complex64::new(3.0, -0.2), Complex64::new(0.4, 0.0)] {
            let (p, q) = free_overlaps_closed(k, &s);
            let (pq, qq) = free_overlaps_by_quadrature(k, &s);
            assert!((p - pq).norm() < 1e-8 && (q - qq).norm() < 1e-8, "{k}");
        }
    }

    #[test]
    fn resolvent_matches_double_integral() {
        let spec = ModelSpec::stark(1.0, 0.8, 0.2).unwrap();
        let s = WellState::from(WellEigenpair { n: 1, kappa: 1.0 });
        let z = Complex64::new(2.0, 0.4);
        let fast = state_resolvent(&spec, &s, z).unwrap();
        let (x, w) = gauss_legendre(40);
        let mut slow = Complex64::new(0.0, 0.0);
        for (xi, wi) in x.iter().zip(&w) {
            for (yj, wj) in x.iter().zip(&w) {
                // the kernel has a kink on the diagonal, so this is only a rough check
                slow += wi * wj * s.eval(*xi) * s.eval(*yj) * greens_kernel(&spec, z, *xi, *yj).unwrap().to_complex();
            }
        }
        assert!((fast - slow).norm() < 1e-3 * fast.norm(), "{fast} {slow}");
    }

    #[test]
    fn density_concentrates_near_first_level() {
        let spec = ModelSpec::free(1.0, 0.01).unwrap();
        let s = WellState::from(WellEigenpair { n: 1, kappa: 1.0 });
        let e1 = WellEigenpair { n: 1, kappa: 1.0 }.energy();
        let window = EnergyWindow::new(e1 - 0.1, e1 + 0.1, 1e-3).unwrap();
        let table = SpectralTable::build(&spec, &s, &window, 0.0).unwrap();
        assert!(table.mass() >= 0.9, "{}", table.mass());
        assert!(table.min_density() >= -1e-8);
    }

    #[test]
    fn density_integrates_to_norm() {
        let spec = ModelSpec::free(1.0, 0.5).unwrap();
        let s = WellState::from(WellEigenpair { n: 1, kappa: 1.0 });
        let e1 = WellEigenpair { n: 1, kappa: 1.0 }.energy();
        let window = EnergyWindow::new(0.02, 50.0 * e1, 0.01).unwrap();
        let table = SpectralTable::build(&spec, &s, &window, 0.0).unwrap();
        assert!((table.mass() - 1.0).abs() < 0.02, "{}", table.mass());
        assert!(table.min_density() >= -1e-8);
    }

    #[test]
    fn far_window_has_small_amplitude() {
        let spec = ModelSpec::free(1.0, 0.01).unwrap();
        let s = WellState::from(WellEigenpair { n: 1, kappa: 1.0 });
        let window = EnergyWindow::new(4.0, 8.0, 0.5).unwrap();
        let amp = survival_exact(&spec, &s, &window, &[0.0, 1.0, 5.0]).unwrap();
        assert!(amp.iter().all(|a| a.norm() < 0.05));
    }

    #[test]
    fn single_resonance_term() {
        let spec = ModelSpec::free(1.0, 0.05).unwrap();
        let s = WellState::from(WellEigenpair { n: 1, kappa: 1.0 });
        let window = EnergyWindow::new(1.5, 3.5, 0.5).unwrap();
        let z1 = shape_resonance_energy(&spec, 1).unwrap();
        assert!(z1.im < 0.0);
        let sum = survival_resonance_sum(&spec, &s, &window, &[0.0, 10.0]).unwrap();
        assert!((sum[0] - 1.0).norm() < 1e-15);
        assert!((sum[1].norm() - (10.0 * z1.im).exp()).abs() < 1e-12);
        // Im sqrt z1 is about -(eta^2 / kappa)(pi / 2 kappa)^2
        let w = z1.sqrt();
        let approx = -(0.05f64.powi(2)) * (PI / 2.0).powi(2);
        assert!((w.im - approx).abs() < 0.2 * approx.abs());
        assert!((z1.im - 2.0 * w.re * w.im).abs() < 1e-12);
    }

    #[test]
    fn residues_approach_one() {
        let s = WellState::from(WellEigenpair { n: 1, kappa: 1.0 });
        let mut last = f64::INFINITY;
        for eta in [0.05, 0.02, 0.01] {
            let spec = ModelSpec::free(1.0, eta).unwrap();
            let z1 = shape_resonance_energy(&spec, 1).unwrap();
            let res = resolvent_residue(&spec, &s, z1, 0.5 * z1.im.abs()).unwrap();
            let gap = (res - 1.0).norm();
            assert!(gap < last, "eta {eta}: {res}");
            last = gap;
        }
        assert!(last < 0.05);
    }

    #[test]
    fn zero_field_is_identical() {
        let spec = ModelSpec::free(1.0, 1.0).unwrap();
        let s = WellState::from(WellEigenpair { n: 1, kappa: 1.0 });
        let window = EnergyWindow::new(1.5, 3.5, 0.5).unwrap();
        let rep = small_field_stability(&spec, 0.0, &s, &window, &[0.0, 1.0]).unwrap();
        assert_eq!(rep.sup_difference, 0.0);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]
        #[test]
        fn kernel_symmetry(re in 0.1f64..6.0, im in 0.01f64..2.0, x in -2.0f64..2.0, y in -2.0f64..2.0, which in 0usize..3) {
            let spec = [
                ModelSpec::free(1.0, 0.3).unwrap(),
                ModelSpec::dirichlet(1.0, 0.3, 4.0).unwrap(),
                ModelSpec::stark(1.0, 0.3, 0.2).unwrap(),
            ][which];
            let z = Complex64::new(re, im);
            let a = greens_kernel(&spec, z, x, y).unwrap().to_complex();
            let b = greens_kernel(&spec, z, y, x).unwrap().to_complex();
            prop_assert!((a - b).norm() <= 1e-8 * a.norm().max(1e-12));
            prop_assert!(resolvent_residual(&spec, z, x, y) < 1e-8);
        }
    }
}
