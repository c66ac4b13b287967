//! Adaptive Gauss–Kronrod (7/15) quadrature of positive integrands given
//! in log form.
//!
//! The integrand is passed as `x ↦ ln f(x)`, so values far below the
//! smallest positive double still contribute correctly. Panels are refined
//! globally: the panel with the largest error estimate is bisected until
//! the summed error falls under `rel_tol` times the summed value.
//! Infinite ends are mapped onto `[0, 1)` with `x = a + s·t/(1 − t)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::special::log_sum_exp;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub max_evals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions { rel_tol: 1e-10, max_evals: 1_000_000 }
    }
}

impl QuadOptions {
    pub fn with_tol(rel_tol: f64) -> Self {
        QuadOptions { rel_tol, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogQuad {
    /// ln of the integral.
    pub log_value: f64,
    /// ln of the error estimate.
    pub log_error: f64,
    pub evals: usize,
}

impl LogQuad {
    pub fn rel_error(&self) -> f64 {
        if self.log_value == f64::NEG_INFINITY {
            0.0
        } else {
            (self.log_error - self.log_value).exp()
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Map {
    Finite,
    Upper { a: f64, s: f64 },
    Lower { b: f64, s: f64 },
}

impl Map {
    /// Unbounded panels use x = a ± s·(e^y − 1), y = t/(1 − t), so power
    /// tails become exponentially decaying in y.
    #[inline]
    fn apply(&self, t: f64) -> (f64, f64) {
        match *self {
            Map::Finite => (t, 0.0),
            Map::Upper { a, s } => {
                let w = 1.0 - t;
                let y = t / w;
                (a + s * y.exp_m1(), s.ln() + y - 2.0 * w.ln())
            }
            Map::Lower { b, s } => {
                let w = 1.0 - t;
                let y = t / w;
                (b - s * y.exp_m1(), s.ln() + y - 2.0 * w.ln())
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    map: Map,
    t0: f64,
    t1: f64,
    lv: f64,
    le: f64,
}

#[derive(PartialEq)]
struct Key(f64, usize);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> Ordering {
        // Larger error first; on ties the older panel wins.
        self.0.total_cmp(&other.0).then_with(|| other.1.cmp(&self.1))
    }
}

fn rule<F: Fn(f64) -> f64>(f: &F, map: Map, t0: f64, t1: f64) -> Result<(f64, f64)> {
    let c = 0.5 * (t0 + t1);
    let h = 0.5 * (t1 - t0);
    let mut lv = [0.0; 15];
    for i in 0..7 {
        lv[2 * i] = node(f, map, c - h * XGK[i])?;
        lv[2 * i + 1] = node(f, map, c + h * XGK[i])?;
    }
    lv[14] = node(f, map, c)?;
    let m = lv.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return Ok((m, m));
    }
    let mut k = WGK[7] * (lv[14] - m).exp();
    let mut g = WG[3] * (lv[14] - m).exp();
    for i in 0..7 {
        let pair = (lv[2 * i] - m).exp() + (lv[2 * i + 1] - m).exp();
        k += WGK[i] * pair;
        if i % 2 == 1 {
            g += WG[i / 2] * pair;
        }
    }
    let scale = m + h.ln();
    let err = (k - g).abs().max(k * 4.0 * f64::EPSILON);
    Ok((scale + k.ln(), scale + err.ln()))
}

#[inline]
fn node<F: Fn(f64) -> f64>(f: &F, map: Map, t: f64) -> Result<f64> {
    let (x, lj) = map.apply(t);
    if !x.is_finite() || !lj.is_finite() {
        return Ok(f64::NEG_INFINITY);
    }
    let v = f(x);
    if v.is_nan() || v == f64::INFINITY {
        return Err(Error::Domain(format!("log-integrand returned {v} at x = {x}")));
    }
    Ok(v + lj)
}

/// Linear sums relative to a movable reference, so that rebasing never
/// overflows.
struct Running {
    r: f64,
    v: f64,
    e: f64,
}

impl Running {
    fn add(&mut self, lv: f64, le: f64, sign: f64) {
        let top = lv.max(le);
        if sign > 0.0 && top > self.r + 600.0 {
            let shift = (self.r - top).exp();
            self.v *= shift;
            self.e *= shift;
            self.r = top;
        }
        self.v += sign * (lv - self.r).exp();
        self.e += sign * (le - self.r).exp();
    }
}

/// ∫_lo^hi exp(log_f(x)) dx. `lo` may be −∞ and `hi` may be +∞.
pub fn integrate_log<F: Fn(f64) -> f64>(log_f: F, lo: f64, hi: f64, opts: &QuadOptions) -> Result<LogQuad> {
    integrate_log_breaks(log_f, lo, hi, &[], opts)
}

/// As [`integrate_log`], with interior points where the integrand has
/// kinks, peaks or jumps. Points outside `(lo, hi)` are ignored.
pub fn integrate_log_breaks<F: Fn(f64) -> f64>(
    log_f: F,
    lo: f64,
    hi: f64,
    breaks: &[f64],
    opts: &QuadOptions,
) -> Result<LogQuad> {
    if lo.is_nan() || hi.is_nan() {
        return Err(Error::Domain("NaN integration limit".into()));
    }
    if lo >= hi {
        return Ok(LogQuad { log_value: f64::NEG_INFINITY, log_error: f64::NEG_INFINITY, evals: 0 });
    }
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|b| b.is_finite() && *b > lo && *b < hi).collect();
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    if lo.is_infinite() && hi.is_infinite() && pts.is_empty() {
        pts.push(0.0);
    }
    let mut edges = Vec::with_capacity(pts.len() + 2);
    edges.push(lo);
    edges.extend(pts);
    edges.push(hi);

    let mut panels: Vec<Panel> = Vec::new();
    let mut evals = 0usize;
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        let (map, t0, t1) = if a == f64::NEG_INFINITY {
            (Map::Lower { b, s: b.abs().max(1.0) }, 0.0, 1.0)
        } else if b == f64::INFINITY {
            (Map::Upper { a, s: a.abs().max(1.0) }, 0.0, 1.0)
        } else {
            (Map::Finite, a, b)
        };
        let (lv, le) = rule(&log_f, map, t0, t1)?;
        evals += 15;
        panels.push(Panel { map, t0, t1, lv, le });
    }

    let (mut run, mut heap) = rebuild(&panels);
    loop {
        if run.v <= 0.0 && run.e <= 0.0 {
            let (lv, le) = exact(&panels);
            if lv == f64::NEG_INFINITY {
                return Ok(LogQuad { log_value: lv, log_error: le, evals });
            }
        }
        if run.e <= opts.rel_tol * run.v {
            let (lv, le) = exact(&panels);
            if le <= lv + opts.rel_tol.ln() {
                return Ok(LogQuad { log_value: lv, log_error: le, evals });
            }
            (run, heap) = rebuild(&panels);
        }
        let Some(Key(_, idx)) = heap.pop() else {
            let (lv, le) = exact(&panels);
            return Err(Error::QuadratureFailure { achieved: (le - lv).exp(), evals });
        };
        if evals + 30 > opts.max_evals {
            let (lv, le) = exact(&panels);
            return Err(Error::QuadratureFailure { achieved: (le - lv).exp(), evals });
        }
        let p = panels[idx];
        let mid = 0.5 * (p.t0 + p.t1);
        if !(mid > p.t0 && mid < p.t1) {
            // Cannot bisect further; leave it out of the heap for good.
            continue;
        }
        let (lv1, le1) = rule(&log_f, p.map, p.t0, mid)?;
        let (lv2, le2) = rule(&log_f, p.map, mid, p.t1)?;
        evals += 30;
        run.add(p.lv, p.le, -1.0);
        run.add(lv1, le1, 1.0);
        run.add(lv2, le2, 1.0);
        panels[idx] = Panel { t1: mid, lv: lv1, le: le1, ..p };
        panels.push(Panel { t0: mid, lv: lv2, le: le2, ..p });
        heap.push(Key(le1, idx));
        heap.push(Key(le2, panels.len() - 1));
        // Guard the running sums against cancellation drift.
        run.v = run.v.max(0.0);
        run.e = run.e.max(0.0);
    }
}

fn exact(panels: &[Panel]) -> (f64, f64) {
    let lv: Vec<f64> = panels.iter().map(|p| p.lv).collect();
    let le: Vec<f64> = panels.iter().map(|p| p.le).collect();
    (log_sum_exp(&lv), log_sum_exp(&le))
}

fn rebuild(panels: &[Panel]) -> (Running, BinaryHeap<Key>) {
    let (lv, le) = exact(panels);
    let r = if lv.max(le).is_finite() { lv.max(le) } else { 0.0 };
    let mut run = Running { r, v: 0.0, e: 0.0 };
    let mut heap = BinaryHeap::with_capacity(panels.len());
    for (i, p) in panels.iter().enumerate() {
        run.add(p.lv, p.le, 1.0);
        if p.le > f64::NEG_INFINITY {
            heap.push(Key(p.le, i));
        }
    }
    (run, heap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn q(f: impl Fn(f64) -> f64, a: f64, b: f64) -> LogQuad {
        integrate_log(f, a, b, &QuadOptions::default()).unwrap()
    }

    #[test]
    fn polynomial_exact() {
        // ∫_0^2 x^3 dx = 4
        let r = q(|x: f64| 3.0 * x.ln(), 0.0, 2.0);
        assert_relative_eq!(r.log_value.exp(), 4.0, max_relative = 1e-12);
    }

    #[test]
    fn gaussian_over_real_line() {
        let r = q(|x| -0.5 * x * x, f64::NEG_INFINITY, f64::INFINITY);
        assert_relative_eq!(r.log_value, 0.5 * (2.0 * std::f64::consts::PI).ln(), max_relative = 1e-11);
    }

    #[test]
    fn deep_underflow_handled_in_log_space() {
        // ∫_1000^∞ e^{-x} dx = e^{-1000}
        let r = q(|x| -x, 1000.0, f64::INFINITY);
        assert_relative_eq!(r.log_value, -1000.0, max_relative = 1e-12);
    }

    #[test]
    fn endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let r = q(|x: f64| -0.5 * x.ln(), 0.0, 1.0);
        assert_relative_eq!(r.log_value.exp(), 2.0, max_relative = 1e-9);
    }

    #[test]
    fn heavy_tail_half_line() {
        // ∫_1^∞ x^{-2} dx = 1
        let r = q(|x: f64| -2.0 * x.ln(), 1.0, f64::INFINITY);
        assert_relative_eq!(r.log_value.exp(), 1.0, max_relative = 1e-9);
    }

    #[test]
    fn breakpoint_at_narrow_peak() {
        // Lorentzian spike of width 1e-6 at x = 0.3.
        let w = 1e-6;
        let f = |x: f64| -(((x - 0.3) / w).powi(2)).ln_1p();
        let want = (w * ((0.7 / w).atan() + (0.3 / w).atan())).ln();
        let r = integrate_log_breaks(f, 0.0, 1.0, &[0.3], &QuadOptions::default()).unwrap();
        assert_relative_eq!(r.log_value, want, max_relative = 1e-10);
    }

    #[test]
    fn empty_and_zero_integrals() {
        assert_eq!(q(|_| 0.0, 1.0, 1.0).log_value, f64::NEG_INFINITY);
        assert_eq!(q(|_| f64::NEG_INFINITY, 0.0, 1.0).log_value, f64::NEG_INFINITY);
    }

    #[test]
    fn nan_is_an_error() {
        assert!(integrate_log(|_| f64::NAN, 0.0, 1.0, &QuadOptions::default()).is_err());
    }

    #[test]
    fn budget_exhaustion_reports_achieved_error() {
        let opts = QuadOptions { rel_tol: 1e-14, max_evals: 100 };
        match integrate_log(|x: f64| -0.9 * x.ln(), 0.0, 1.0, &opts) {
            Err(Error::QuadratureFailure { achieved, .. }) => assert!(achieved > 0.0),
            other => panic!("expected failure, got {other:?}"),
        }
    }
}
