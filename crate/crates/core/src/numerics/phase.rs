//! Continuous phase of a function sampled along a parametrised path.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::ExtendedComplex;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhaseSample {
    pub t: f64,
    /// Unwrapped phase, continuous along the path.
    pub phase: f64,
    pub log_abs: f64,
}

/// Samples of `arg f(gamma(t))` refined until consecutive phases differ by
/// less than `max_step`.
#[derive(Clone, Debug, Default)]
pub struct PhaseTrace {
    pub samples: Vec<PhaseSample>,
}

fn wrap(d: f64) -> f64 {
    let mut d = d % (2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    } else if d <= -PI {
        d += 2.0 * PI;
    }
    d
}

struct Tracer<'a, F> {
    f: &'a F,
    max_step: f64,
    max_doublings: u32,
}

impl<F: Fn(f64) -> ExtendedComplex> Tracer<'_, F> {
    fn eval(&self, t: f64) -> Result<(f64, f64)> {
        let v = (self.f)(t);
        if v.is_zero() || !v.is_finite() {
            return Err(Error::UnresolvedPhase { at: t });
        }
        Ok((v.arg(), v.log_abs()))
    }

    /// Pushes samples strictly after `a` up to and including `b`.
    fn refine(
        &self,
        a: (f64, f64, f64),
        b: (f64, f64, f64),
        depth: u32,
        out: &mut Vec<PhaseSample>,
    ) -> Result<()> {
        let (ta, pa, _) = a;
        let (tb, raw_b, lb) = b;
        let d = wrap(raw_b - pa);
        if d.abs() < self.max_step {
            out.push(PhaseSample { t: tb, phase: pa + d, log_abs: lb });
            return Ok(());
        }
        if depth >= self.max_doublings {
            return Err(Error::UnresolvedPhase { at: 0.5 * (ta + tb) });
        }
        let tm = 0.5 * (ta + tb);
        let (raw_m, lm) = self.eval(tm)?;
        self.refine(a, (tm, raw_m, lm), depth + 1, out)?;
        let last = *out.last().expect("refine pushes at least one sample");
        self.refine((last.t, last.phase, last.log_abs), b, depth + 1, out)
    }
}

impl PhaseTrace {
    /// Traces `f` over `[t0, t1]` starting from `initial` equal intervals.
    ///
    /// Each initial interval may be halved at most `max_doublings` times; if
    /// the phase still jumps by `max_step` or more the path is assumed to pass
    /// too close to a zero and [`Error::UnresolvedPhase`] is returned.
    pub fn along<F>(
        f: F,
        t0: f64,
        t1: f64,
        initial: usize,
        max_step: f64,
        max_doublings: u32,
    ) -> Result<Self>
    where
        F: Fn(f64) -> ExtendedComplex,
    {
        let tracer = Tracer { f: &f, max_step, max_doublings };
        let n = initial.max(1);
        let (p0, l0) = tracer.eval(t0)?;
        let mut samples = vec![PhaseSample { t: t0, phase: p0, log_abs: l0 }];
        for k in 1..=n {
            let t = if k == n { t1 } else { t0 + (t1 - t0) * k as f64 / n as f64 };
            let (raw, l) = tracer.eval(t)?;
            let prev = *samples.last().unwrap();
            tracer.refine((prev.t, prev.phase, prev.log_abs), (t, raw, l), 0, &mut samples)?;
        }
        Ok(Self { samples })
    }

    /// Default resolution for argument-principle work: steps below `pi/2` and
    /// at most 22 halvings per initial interval.
    pub fn for_winding<F>(f: F, t0: f64, t1: f64, initial: usize) -> Result<Self>
    where
        F: Fn(f64) -> ExtendedComplex,
    {
        Self::along(f, t0, t1, initial, 0.5 * PI, 22)
    }

    pub fn total_change(&self) -> f64 {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => b.phase - a.phase,
            _ => 0.0,
        }
    }

    pub fn min_log_abs(&self) -> f64 {
        self.samples.iter().map(|s| s.log_abs).fold(f64::INFINITY, f64::min)
    }

    /// Continuous phase at `t` given the raw principal argument there, using
    /// the bracketing samples to pick the branch.
    pub fn unwrap_at(&self, t: f64, raw: f64) -> f64 {
        let i = self.samples.partition_point(|s| s.t <= t);
        let guess = if i == 0 {
            self.samples[0].phase
        } else if i >= self.samples.len() {
            self.samples[self.samples.len() - 1].phase
        } else {
            let a = self.samples[i - 1];
            let b = self.samples[i];
            let s = if b.t > a.t { (t - a.t) / (b.t - a.t) } else { 0.0 };
            a.phase + s * (b.phase - a.phase)
        };
        guess + wrap(raw - guess)
    }

    /// Appends another trace whose first sample coincides with this trace's
    /// last sample, shifting its phase to keep continuity.
    pub fn extend_with(&mut self, other: &PhaseTrace) {
        let Some(first) = other.samples.first() else { return };
        let shift = match self.samples.last() {
            Some(last) => {
                let target = last.phase + wrap(first.phase - last.phase);
                target - first.phase
            }
            None => 0.0,
        };
        let skip = usize::from(!self.samples.is_empty());
        self.samples.extend(
            other.samples.iter().skip(skip).map(|s| PhaseSample { phase: s.phase + shift, ..*s }),
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn circle_around_double_zero() {
        let f = |t: f64| {
            let z = Complex64::from_polar(1.0, 2.0 * PI * t);
            ExtendedComplex::from(z * z)
        };
        let tr = PhaseTrace::for_winding(f, 0.0, 1.0, 4).unwrap();
        let w = tr.total_change() / (2.0 * PI);
        assert!((w - 2.0).abs() < 1e-6);
        for pair in tr.samples.windows(2) {
            assert!((pair[1].phase - pair[0].phase).abs() < 0.5 * PI);
        }
    }

    #[test]
    fn rapid_phase_is_refined() {
        let f = |t: f64| ExtendedComplex::exp(Complex64::new(0.0, 300.0 * t));
        let tr = PhaseTrace::for_winding(f, 0.0, 1.0, 128).unwrap();
        assert!((tr.total_change() - 300.0).abs() < 1e-9);
    }

    #[test]
    fn zero_on_path_is_reported() {
        let f = |t: f64| ExtendedComplex::from(Complex64::new(t - 0.5, 0.0));
        assert!(PhaseTrace::for_winding(f, 0.0, 1.0, 2).is_err());
    }

    #[test]
    fn unwrap_between_samples() {
        let f = |t: f64| ExtendedComplex::exp(Complex64::new(0.0, 10.0 * t));
        let tr = PhaseTrace::for_winding(f, 0.0, 1.0, 8).unwrap();
        let t = 0.77;
        let raw = Complex64::from_polar(1.0, 10.0 * t).arg();
        assert!((tr.unwrap_at(t, raw) - 10.0 * t).abs() < 1e-12);
    }
}
