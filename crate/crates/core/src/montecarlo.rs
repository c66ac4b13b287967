//! Monte Carlo tail estimates.
//!
//! Samples are drawn in fixed-size blocks; block `b` always uses stream
//! `(seed, b)` and block results are merged in block order, so output is
//! bitwise identical for every worker count.

use std::io::Write;
use std::sync::Arc;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oracle::Op;
use crate::rng::{ordered_map, stream, StreamRng};
use crate::tail_model::DistributionModel;

pub const BLOCK: usize = 8192;
/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;
pub const MIN_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum McMethod {
    Direct,
    Conditional,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TailEstimate {
    pub u: f64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub n: usize,
    pub method: McMethod,
    /// Standard error of `p_hat`.
    pub std_error: f64,
}

impl TailEstimate {
    /// Per-sample variance of the estimator's summands.
    pub fn sample_variance(&self) -> f64 {
        self.std_error * self.std_error * self.n as f64
    }

    pub fn covers(&self, p: f64) -> bool {
        self.ci_lo <= p && p <= self.ci_hi
    }
}

pub fn write_csv<W: Write>(rows: &[TailEstimate], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r).map_err(|e| Error::Domain(format!("CSV write failed: {e}")))?;
    }
    out.flush().map_err(|e| Error::Domain(format!("CSV write failed: {e}")))
}

/// Wilson score interval for `k` successes out of `n`.
pub fn wilson(k: u64, n: usize, z: f64) -> (f64, f64) {
    let n_f = n as f64;
    let p = k as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let center = (p + z2 / (2.0 * n_f)) / denom;
    let half = z / denom * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt();
    ((center - half).clamp(0.0, p), (center + half).clamp(p, 1.0))
}

/// How a pair of draws becomes one observation.
#[derive(Clone)]
pub enum Combine {
    Sum,
    Product,
    Custom(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl Combine {
    fn apply(&self, a: f64, b: f64) -> f64 {
        match self {
            Combine::Sum => a + b,
            Combine::Product => a * b,
            Combine::Custom(f) => f(a, b),
        }
    }
}

fn check_n(n: usize) -> Result<()> {
    if n < MIN_SAMPLES {
        return Err(Error::spec(format!("need at least {MIN_SAMPLES} samples, got {n}")));
    }
    Ok(())
}

fn blocks(n: usize) -> usize {
    n.div_ceil(BLOCK)
}

fn block_len(n: usize, b: usize) -> usize {
    BLOCK.min(n - b * BLOCK)
}

/// Direct exceedance frequencies of an arbitrary sampler.
pub fn estimate_sf_with<S>(sample: S, grid: &[f64], n: usize, seed: u64, workers: usize) -> Result<Vec<TailEstimate>>
where
    S: Fn(&mut StreamRng) -> f64 + Sync + Send,
{
    check_n(n)?;
    let counts = ordered_map(blocks(n), workers, |b| {
        let mut rng = stream(seed, b as u64);
        let mut c = vec![0u64; grid.len()];
        for _ in 0..block_len(n, b) {
            let v = sample(&mut rng);
            for (j, &u) in grid.iter().enumerate() {
                if v > u {
                    c[j] += 1;
                }
            }
        }
        c
    });
    Ok(grid
        .iter()
        .enumerate()
        .map(|(j, &u)| {
            let k: u64 = counts.iter().map(|c| c[j]).sum();
            let p = k as f64 / n as f64;
            let (ci_lo, ci_hi) = wilson(k, n, Z95);
            TailEstimate {
                u,
                p_hat: p,
                ci_lo,
                ci_hi,
                n,
                method: McMethod::Direct,
                std_error: (p * (1.0 - p) / n as f64).sqrt(),
            }
        })
        .collect())
}

/// Direct estimate of P(X > u), or of P(combine(X, Y) > u) when `y` is given.
pub fn estimate_sf(
    x: &DistributionModel,
    y: Option<&DistributionModel>,
    combine: &Combine,
    grid: &[f64],
    n: usize,
    seed: u64,
    workers: usize,
) -> Result<Vec<TailEstimate>> {
    match y {
        None => estimate_sf_with(|r| x.sample_dyn(r as &mut dyn RngCore), grid, n, seed, workers),
        Some(y) => estimate_sf_with(
            |r| {
                let a = x.sample_dyn(r as &mut dyn RngCore);
                let b = y.sample_dyn(r as &mut dyn RngCore);
                combine.apply(a, b)
            },
            grid,
            n,
            seed,
            workers,
        ),
    }
}

/// Running mean and centered sum of squares, merged pairwise.
#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if o.n == 0.0 {
            return self;
        }
        if self.n == 0.0 {
            return o;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments { n, mean: self.mean + d * o.n / n, m2: self.m2 + o.m2 + d * d * self.n * o.n / n }
    }
}

/// Averages SF_X(u − Y) (or SF_X(u / Y)) over draws of Y.
pub fn conditional_sf(
    x: &DistributionModel,
    y: &DistributionModel,
    op: Op,
    grid: &[f64],
    n: usize,
    seed: u64,
    workers: usize,
) -> Result<Vec<TailEstimate>> {
    check_n(n)?;
    if op == Op::Product {
        for m in [x, y] {
            if m.support().lo < 0.0 {
                return Err(Error::domain(format!("{} charges negative values; products need (0, inf)", m.label())));
            }
        }
        if grid.iter().any(|&u| !(u > 0.0)) {
            return Err(Error::domain("product tail needs u > 0"));
        }
    }
    conditional_mean_with(
        |rng| y.sample(rng),
        |&v, u| {
            let arg = match op {
                Op::Sum => u - v,
                Op::Product => u / v,
            };
            x.log_sf(arg).exp()
        },
        grid,
        n,
        seed,
        workers,
    )
}

/// Averages `eval(draw, u)` over draws, for each u in `grid`.
///
/// `eval` should be a conditional exceedance probability in [0, 1].
pub fn conditional_mean_with<D, S, E>(
    draw: S,
    eval: E,
    grid: &[f64],
    n: usize,
    seed: u64,
    workers: usize,
) -> Result<Vec<TailEstimate>>
where
    S: Fn(&mut StreamRng) -> D + Sync + Send,
    E: Fn(&D, f64) -> f64 + Sync + Send,
{
    check_n(n)?;
    let per_block = ordered_map(blocks(n), workers, |b| {
        let mut rng = stream(seed, b as u64);
        let mut acc = vec![Moments::default(); grid.len()];
        for _ in 0..block_len(n, b) {
            let d = draw(&mut rng);
            for (j, &u) in grid.iter().enumerate() {
                acc[j].push(eval(&d, u));
            }
        }
        acc
    });
    Ok(grid
        .iter()
        .enumerate()
        .map(|(j, &u)| {
            let m = per_block.iter().map(|a| a[j]).fold(Moments::default(), Moments::merge);
            let var = if n > 1 { (m.m2 / (m.n - 1.0)).max(0.0) } else { 0.0 };
            let se = (var / n as f64).sqrt();
            let p = m.mean.clamp(0.0, 1.0);
            TailEstimate {
                u,
                p_hat: p,
                ci_lo: (p - Z95 * se).max(0.0),
                ci_hi: (p + Z95 * se).min(1.0),
                n,
                method: McMethod::Conditional,
                std_error: se,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::sf_sum_exact;
    use crate::tail_model::make_model;

    fn m(s: &str) -> DistributionModel {
        make_model(s).unwrap()
    }

    #[test]
    fn exponential_direct() {
        let e = estimate_sf(&m("weibull(1,1)"), None, &Combine::Sum, &[1.0], 1_000_000, 1, 1).unwrap();
        assert!(e[0].covers((-1f64).exp()), "{:?}", e[0]);
        assert!((e[0].p_hat - (-1f64).exp()).abs() < 0.002);
    }

    #[test]
    fn below_support_is_one() {
        let e = estimate_sf(&m("edge(0,1)"), None, &Combine::Sum, &[-2.0], 5000, 3, 1).unwrap();
        assert_eq!(e[0].p_hat, 1.0);
        assert_eq!(e[0].ci_hi, 1.0);
        assert!(e[0].ci_lo < 1.0 && e[0].ci_lo > 0.99);
    }

    #[test]
    fn deterministic_and_worker_invariant() {
        let x = m("weibull(1,2)");
        let y = m("edge(0,1)");
        let grid = [0.5, 1.0, 1.5];
        let a = estimate_sf(&x, Some(&y), &Combine::Sum, &grid, 50_000, 11, 1).unwrap();
        assert_eq!(a, estimate_sf(&x, Some(&y), &Combine::Sum, &grid, 50_000, 11, 1).unwrap());
        assert_eq!(a, estimate_sf(&x, Some(&y), &Combine::Sum, &grid, 50_000, 11, 2).unwrap());
        assert_eq!(a, estimate_sf(&x, Some(&y), &Combine::Sum, &grid, 50_000, 11, 8).unwrap());
        let c = conditional_sf(&x, &y, Op::Sum, &grid, 50_000, 11, 1).unwrap();
        assert_eq!(c, conditional_sf(&x, &y, Op::Sum, &grid, 50_000, 11, 8).unwrap());
    }

    #[test]
    fn too_few_samples() {
        assert!(matches!(
            estimate_sf(&m("normal"), None, &Combine::Sum, &[0.0], 999, 0, 1),
            Err(Error::Spec(_))
        ));
    }

    #[test]
    fn wilson_degenerate_ends() {
        let (lo, hi) = wilson(0, 1000, Z95);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.01);
        let (lo, hi) = wilson(1000, 1000, Z95);
        assert_eq!(hi, 1.0);
        assert!(lo > 0.99);
    }

    #[test]
    fn conditional_with_zero_addend_is_exact() {
        let x = m("weibull(1,2)");
        let e = conditional_sf(&x, &m("constant(0)"), Op::Sum, &[0.7, 2.0], 2000, 5, 1).unwrap();
        for t in e {
            assert_eq!(t.p_hat, x.sf(t.u));
            assert_eq!(t.ci_lo, t.ci_hi);
        }
    }

    #[test]
    fn conditional_covers_oracle_and_beats_direct() {
        let x = m("weibull(1,2)");
        let y = m("edge(0,1)");
        let truth = sf_sum_exact(&x, &y, 8.0).unwrap().exp();
        let c = conditional_sf(&x, &y, Op::Sum, &[8.0], 100_000, 21, 1).unwrap();
        assert!(c[0].covers(truth), "{:?} vs {truth}", c[0]);
        for u in [0.5, 1.0, 2.0] {
            let d = estimate_sf(&x, Some(&y), &Combine::Sum, &[u], 100_000, 4, 1).unwrap();
            let c = conditional_sf(&x, &y, Op::Sum, &[u], 100_000, 4, 1).unwrap();
            assert!(c[0].sample_variance() <= d[0].sample_variance(), "u = {u}");
        }
    }

    #[test]
    fn coverage_over_replications() {
        let x = m("weibull(1,2)");
        let y = m("edge(0,1)");
        let truth = sf_sum_exact(&x, &y, 0.5).unwrap().exp();
        let hits = (0..200u64)
            .filter(|&s| estimate_sf(&x, Some(&y), &Combine::Sum, &[0.5], 2000, 1000 + s, 1).unwrap()[0].covers(truth))
            .count();
        assert!(hits >= 180, "{hits}");
    }

    #[test]
    fn csv_has_estimate_columns() {
        let e = estimate_sf(&m("normal"), None, &Combine::Sum, &[0.0], 1000, 0, 1).unwrap();
        let mut buf = Vec::new();
        write_csv(&e, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("u,p_hat,ci_lo,ci_hi,n,method,std_error\n"));
    }
}
