//! Reference survival functions for X + Y and X·Y, computed by
//! conditioning on Y:
//!
//! ```text
//! P(X + Y > u) = E SF_X(u − Y),    P(XY > u) = E SF_X(u / Y).
//! ```
//!
//! The expectation is an adaptive quadrature against Y's density, in log
//! space. Breakpoints are placed on geometric ladders towards Y's finite
//! endpoints and towards the points where SF_X(u − y) leaves 0 or 1, which
//! is where the integrand concentrates for the fixtures of interest.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_log_breaks, QuadOptions};
use crate::rng::ordered_map;
use crate::tail_model::{AsymptoticTail, DistributionModel, Method, RatioRow, RatioTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Op {
    Sum,
    Product,
}

const ORACLE_TOL: f64 = 1e-10;

/// Points approaching `p` from inside `[lo, hi]` geometrically.
fn ladder_towards(p: f64, lo: f64, hi: f64, out: &mut Vec<f64>) {
    if !p.is_finite() || p < lo || p > hi {
        return;
    }
    let floor = 1e-13 * p.abs().max(1.0);
    for (dir, other) in [(-1.0, lo), (1.0, hi)] {
        let span = if other.is_finite() { (other - p).abs() } else { p.abs().max(1.0) };
        let mut d = 0.5 * span;
        while d > floor {
            out.push(p + dir * d);
            d *= 0.25;
        }
    }
    out.push(p);
}

/// ln E[exp(log_g(Y))] for a law with an atom or a density.
pub(crate) fn log_expectation<G: Fn(f64) -> f64>(y: &DistributionModel, log_g: G, focus: &[f64]) -> Result<f64> {
    if let Some(c) = y.atom() {
        return Ok(log_g(c));
    }
    if !y.has_density() {
        return Err(Error::Unsupported(format!(
            "{} has neither a density nor an atom; cannot condition on it",
            y.label()
        )));
    }
    let sup = y.support();
    let mut breaks = Vec::new();
    for &p in [sup.lo, sup.hi].iter().chain(focus) {
        ladder_towards(p, sup.lo, sup.hi, &mut breaks);
    }
    let log_f = |v: f64| {
        let d = y.log_density(v).unwrap_or(f64::NEG_INFINITY);
        if d == f64::NEG_INFINITY {
            return d;
        }
        d + log_g(v)
    };
    let q = integrate_log_breaks(log_f, sup.lo, sup.hi, &breaks, &QuadOptions::with_tol(ORACLE_TOL))?;
    Ok(q.log_value.min(0.0))
}

/// ln P(X + Y > u).
pub fn sf_sum_exact(x: &DistributionModel, y: &DistributionModel, u: f64) -> Result<f64> {
    if u.is_nan() {
        return Err(Error::domain("u is NaN"));
    }
    let xs = x.support();
    let focus = [u - xs.lo, u - xs.hi];
    log_expectation(y, |v| x.log_sf(u - v), &focus)
}

/// ln P(X·Y > u) for laws on [0, ∞).
pub fn sf_product_exact(x: &DistributionModel, y: &DistributionModel, u: f64) -> Result<f64> {
    for m in [x, y] {
        if m.support().lo < 0.0 {
            return Err(Error::domain(format!("{} charges negative values; products need (0, inf)", m.label())));
        }
    }
    if !(u > 0.0) {
        return Err(Error::domain(format!("product tail needs u > 0, got {u}")));
    }
    let xs = x.support();
    let focus = [u / xs.lo, u / xs.hi];
    log_expectation(
        y,
        |v| {
            if v <= 0.0 {
                f64::NEG_INFINITY
            } else {
                x.log_sf(u / v)
            }
        },
        &focus,
    )
}

pub fn sf_exact(x: &DistributionModel, y: &DistributionModel, op: Op, u: f64) -> Result<f64> {
    match op {
        Op::Sum => sf_sum_exact(x, y, u),
        Op::Product => sf_product_exact(x, y, u),
    }
}

/// Oracle against `predicted` on a grid; rows run on `workers` threads and
/// failures are recorded per row.
pub fn ratio_table(
    x: &DistributionModel,
    y: &DistributionModel,
    op: Op,
    predicted: &AsymptoticTail,
    grid: &[f64],
    workers: usize,
) -> Result<RatioTable> {
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::spec("grid must be strictly increasing"));
    }
    let rows = ordered_map(grid.len(), workers, |i| {
        let u = grid[i];
        let h = predicted.log_eval(u);
        let s = sf_exact(x, y, op, u);
        match (s, h) {
            (Ok(s), Ok(h)) if s.is_finite() => RatioRow::ok(u, s, h, Method::Quadrature),
            (Ok(s), Ok(h)) => RatioRow::failed(
                u,
                Some(s),
                Some(h),
                Method::Quadrature,
                &Error::domain("exact survival underflowed to zero"),
            ),
            (Err(e), h) => RatioRow::failed(u, None, h.ok(), Method::Quadrature, &e),
            (Ok(s), Err(e)) => RatioRow::failed(u, Some(s), None, Method::Quadrature, &e),
        }
    });
    Ok(RatioTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asymptotic_engine::{product_mixed_tail, sum_mixed_tail};
    use crate::special::{ln_std_normal_sf, log_sum_exp};
    use crate::tail_model::{make_model, EdgeTail, WeibullTail};
    use approx::assert_relative_eq;

    fn m(s: &str) -> DistributionModel {
        make_model(s).unwrap()
    }

    #[test]
    fn adding_zero() {
        for u in [0.5, 3.0, 30.0] {
            assert_relative_eq!(sf_sum_exact(&m("weibull(1,1)"), &m("constant(0)"), u).unwrap(), -u);
        }
    }

    /// Brute-force midpoint rule with 10^6 nodes.
    #[test]
    fn weibull_plus_edge_brute_force() {
        let n = 1_000_000;
        let terms: Vec<f64> = (0..n)
            .map(|i| {
                let v = (i as f64 + 0.5) / n as f64;
                -(2.0 + v) * (2.0 + v)
            })
            .collect();
        let brute = log_sum_exp(&terms) - (n as f64).ln();
        let q = sf_sum_exact(&m("weibull(1,2)"), &m("edge(0,1)"), 2.0).unwrap();
        assert!(((q - brute).exp() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn gaussian_convolution() {
        for u in [1.0, 3.0, 5.0] {
            let q = sf_sum_exact(&m("normal"), &m("normal"), u).unwrap();
            assert_relative_eq!(q, ln_std_normal_sf(u / 2f64.sqrt()), max_relative = 1e-9);
        }
    }

    #[test]
    fn product_trivial_cases() {
        for u in [0.5, 2.0, 7.0] {
            let q = sf_product_exact(&m("weibull(1,2)"), &m("constant(2)"), u).unwrap();
            assert_relative_eq!(q, -u * u / 4.0, max_relative = 1e-12);
        }
        let q = sf_product_exact(&m("constant(1)"), &m("pareto(1,2)"), 10.0).unwrap();
        assert_relative_eq!(q, (1e-2f64).ln(), max_relative = 1e-9);
    }

    #[test]
    fn product_domain_errors() {
        assert!(matches!(sf_product_exact(&m("normal"), &m("pareto(1,2)"), 1.0), Err(Error::Domain(_))));
        assert!(matches!(sf_product_exact(&m("weibull(1,2)"), &m("edge(0,1)"), 1.0), Err(Error::Domain(_))));
        assert!(matches!(sf_product_exact(&m("weibull(1,2)"), &m("edge(2,1)"), 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn conditioning_needs_density_or_atom() {
        let surrogate = DistributionModel::tail_exact(&WeibullTail::new(1.0, 0.0, 1.0, 2.0, 0.0).unwrap().into()).unwrap();
        assert!(matches!(sf_sum_exact(&m("normal"), &surrogate, 1.0), Err(Error::Unsupported(_))));
        assert!(sf_sum_exact(&surrogate, &m("normal"), 1.0).is_ok());
    }

    #[test]
    fn symmetry() {
        let pairs = [("weibull(1,2)", "edge(0,1)"), ("normal", "lognormal(0,1)"), ("pareto(1,2)", "weibull(1,1)")];
        for (a, b) in pairs {
            for u in [0.5, 2.0, 6.0] {
                let ab = sf_sum_exact(&m(a), &m(b), u).unwrap();
                let ba = sf_sum_exact(&m(b), &m(a), u).unwrap();
                assert!(((ab - ba).exp() - 1.0).abs() < 1e-9, "{a} {b} {u}: {ab} {ba}");
            }
        }
    }

    #[test]
    fn monotone_on_fixture_grids() {
        let cases = [
            ("weibull(1,2)", "edge(0,1)", Op::Sum, vec![4.0, 6.0, 8.0, 10.0]),
            ("weibull(1,2)", "edge(2,1)", Op::Product, vec![8.0, 12.0, 16.0, 20.0]),
            ("lognormal(0,1)", "pareto(1,2)", Op::Product, vec![10.0, 100.0, 1000.0]),
            ("weibull(1,2)", "pareto(1,2)", Op::Sum, vec![10.0, 100.0, 1000.0]),
        ];
        for (a, b, op, grid) in cases {
            let v: Vec<f64> = grid.iter().map(|&u| sf_exact(&m(a), &m(b), op, u).unwrap()).collect();
            assert!(v.windows(2).all(|w| w[1] <= w[0]), "{a} {b}: {v:?}");
        }
    }

    #[test]
    fn ratio_table_self_comparison_and_empty_grid() {
        let x = m("weibull(1,2)");
        let tail = *x.asymptotic_tail().unwrap();
        let t = ratio_table(&x, &m("constant(0)"), Op::Sum, &tail, &[1.0, 2.0, 5.0, 20.0], 1).unwrap();
        for r in &t.rows {
            assert!((r.ratio.unwrap() - 1.0).abs() < 1e-9);
        }
        assert!(ratio_table(&x, &m("constant(0)"), Op::Sum, &tail, &[], 1).unwrap().is_empty());
        assert!(ratio_table(&x, &m("constant(0)"), Op::Sum, &tail, &[2.0, 1.0], 1).is_err());
    }

    #[test]
    fn failed_rows_are_kept() {
        let x = m("weibull(1,2)");
        let y = m("edge(1,1)");
        let pred = sum_mixed_tail(&WeibullTail::new(1.0, 0.0, 1.0, 2.0, 0.0).unwrap(), &EdgeTail::new(1.0, 1.0, 1.0).unwrap())
            .unwrap()
            .into();
        let t = ratio_table(&x, &y, Op::Sum, &pred, &[0.5, 4.0], 1).unwrap();
        assert!(!t.rows[0].is_ok());
        assert!(t.rows[1].is_ok());
    }

    #[test]
    fn sum_fixture_ratios() {
        let x = WeibullTail::new(1.0, 0.0, 1.0, 2.0, 0.0).unwrap();
        let pred = sum_mixed_tail(&x, &EdgeTail::new(1.0, 0.0, 1.0).unwrap()).unwrap().into();
        let t = ratio_table(&m("weibull(1,2)"), &m("edge(0,1)"), Op::Sum, &pred, &[4.0, 6.0, 8.0, 10.0], 2).unwrap();
        let r = t.ratios();
        // Reference ratios from an independent high-precision quadrature.
        for (got, want) in r.iter().zip([0.9712, 0.98665, 0.99236, 0.99507]) {
            assert!((got - want).abs() < 2e-4, "{r:?}");
        }
    }

    #[test]
    fn product_fixture_ratios() {
        let x = WeibullTail::new(1.0, 0.0, 1.0, 2.0, 0.0).unwrap();
        let pred = product_mixed_tail(&x, &EdgeTail::new(1.0, 2.0, 1.0).unwrap()).unwrap().into();
        let t =
            ratio_table(&m("weibull(1,2)"), &m("edge(2,1)"), Op::Product, &pred, &[8.0, 12.0, 16.0, 20.0], 1).unwrap();
        let r = t.ratios();
        for (got, want) in r.iter().zip([0.9184, 0.9610, 0.9774, 0.98536]) {
            assert!((got - want).abs() < 2e-4, "{r:?}");
        }
    }

    #[test]
    fn worker_count_does_not_change_bits() {
        let x = WeibullTail::new(1.0, 0.0, 1.0, 2.0, 0.0).unwrap();
        let pred = sum_mixed_tail(&x, &EdgeTail::new(1.0, 0.0, 1.0).unwrap()).unwrap().into();
        let grid: Vec<f64> = (1..=12).map(|i| i as f64).collect();
        let a = ratio_table(&m("weibull(1,2)"), &m("edge(0,1)"), Op::Sum, &pred, &grid, 1).unwrap();
        let b = ratio_table(&m("weibull(1,2)"), &m("edge(0,1)"), Op::Sum, &pred, &grid, 8).unwrap();
        assert_eq!(a, b);
    }
}
