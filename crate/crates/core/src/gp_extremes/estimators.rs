use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::fbm::FbmGenerator;
use crate::error::{Error, Result};
use crate::montecarlo::{estimate_sf_with, TailEstimate, Z95};
use crate::rng::stream;

/// Label carried by every simulated constant.
pub const ESTIMATED: &str = "estimated";

const BOOTSTRAP_STREAM: u64 = 1 << 48;

/// A Monte Carlo estimate of a constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub quantity: String,
    pub value: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub std_error: f64,
    pub n_paths: usize,
    pub n_steps: usize,
    pub horizon: f64,
    pub method: String,
    pub label: String,
    pub truncation: String,
    pub seed: u64,
}

impl Estimate {
    pub fn ci_width(&self) -> f64 {
        self.ci_hi - self.ci_lo
    }

    /// Whether `target` lies within the CI widened by `rel` · target.
    pub fn within(&self, target: f64, rel: f64) -> bool {
        let slack = rel * target.abs();
        self.ci_lo - slack <= target && target <= self.ci_hi + slack
    }
}

fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0).max(1.0);
    (m, (v / n).sqrt())
}

fn check_budget(n_paths: usize, n_steps: usize, horizon: f64) -> Result<()> {
    if n_paths < 2 {
        return Err(Error::spec("need at least two paths"));
    }
    if n_steps < 2 || !n_steps.is_power_of_two() {
        return Err(Error::spec(format!("n_steps must be a power of two >= 2, got {n_steps}")));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::spec(format!("horizon must be positive, got {horizon}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PickandsMethod {
    /// E[e^{max V} / ∫ e^V] over a two-sided window centred at 0.
    #[default]
    ChangeOfMeasure,
    /// (1/T) E exp max_{[0,T]} (√2 B(t) − t^α).
    PlugIn,
}

/// Pickands constant H_α from `n_paths` paths of B_{α/2} on a window of
/// length `horizon` split into `n_steps` steps.
pub fn pickands_estimate(
    alpha: f64,
    horizon: f64,
    n_paths: usize,
    n_steps: usize,
    seed: u64,
    workers: usize,
    method: PickandsMethod,
) -> Result<Estimate> {
    if !(alpha > 0.0 && alpha <= 2.0) {
        return Err(Error::spec(format!("alpha must lie in (0, 2], got {alpha}")));
    }
    check_budget(n_paths, n_steps, horizon)?;
    let g = FbmGenerator::new(alpha / 2.0, n_steps, horizon)?;
    let dt = g.step();
    let r2 = std::f64::consts::SQRT_2;
    let samples = match method {
        PickandsMethod::ChangeOfMeasure => {
            let drift: Vec<f64> =
                (0..=n_steps).map(|k| (k as f64 * dt - horizon / 2.0).abs().powf(alpha)).collect();
            g.map_paths(n_paths, seed, workers, |w| {
                let mid = w[n_steps / 2];
                let v = |k: usize| r2 * (w[k] - mid) - drift[k];
                let top = (0..=n_steps).map(v).fold(f64::NEG_INFINITY, f64::max);
                let mass: f64 = (0..=n_steps).map(|k| (v(k) - top).exp()).sum::<f64>() * dt;
                1.0 / mass
            })
        }
        PickandsMethod::PlugIn => {
            let drift: Vec<f64> = (0..=n_steps).map(|k| (k as f64 * dt).powf(alpha)).collect();
            g.map_paths(n_paths, seed, workers, |w| {
                let top = w.iter().zip(&drift).map(|(x, d)| r2 * x - d).fold(f64::NEG_INFINITY, f64::max);
                top.exp() / horizon
            })
        }
    };
    let (value, se) = mean_se(&samples);
    let truncation = match method {
        PickandsMethod::ChangeOfMeasure => format!("window [-{0}, {0}], grid step {dt:.3e}", horizon / 2.0),
        PickandsMethod::PlugIn => format!("finite T = {horizon}, grid step {dt:.3e}; bias O(1/T)"),
    };
    Ok(Estimate {
        quantity: format!("pickands_H[{alpha}]"),
        value,
        ci_lo: value - Z95 * se,
        ci_hi: value + Z95 * se,
        std_error: se,
        n_paths,
        n_steps,
        horizon,
        method: serde_json::to_value(method).unwrap().as_str().unwrap().to_string(),
        label: ESTIMATED.into(),
        truncation,
        seed,
    })
}

/// Process whose 𝔈 constant is estimated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaussianProcess {
    Bm,
    Fbm(f64),
}

impl GaussianProcess {
    pub fn hurst(self) -> f64 {
        match self {
            GaussianProcess::Bm => 0.5,
            GaussianProcess::Fbm(h) => h,
        }
    }
}

impl FromStr for GaussianProcess {
    type Err = Error;

    /// `bm`, `fbm(0.7)`, `fbm:H=0.7` or `fbm:0.7`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim().to_ascii_lowercase();
        if s == "bm" || s == "brownian" {
            return Ok(GaussianProcess::Bm);
        }
        let rest = s
            .strip_prefix("fbm")
            .ok_or_else(|| Error::spec(format!("unknown process '{s}'; expected bm or fbm(H)")))?;
        let inner = rest.trim_start_matches([':', '(']).trim_end_matches(')');
        let inner = inner.strip_prefix("h=").unwrap_or(inner);
        let h: f64 = inner.trim().parse().map_err(|_| Error::spec(format!("bad Hurst parameter in '{s}'")))?;
        if !(h > 0.0 && h <= 1.0) {
            return Err(Error::spec(format!("H must lie in (0, 1], got {h}")));
        }
        Ok(GaussianProcess::Fbm(h))
    }
}

/// Per-path sup_t X(t)/(1 + t^β), which the 𝔈 constants are moments of.
pub fn normalized_sups(
    process: GaussianProcess,
    beta: f64,
    horizon: f64,
    n_paths: usize,
    n_steps: usize,
    seed: u64,
    workers: usize,
) -> Result<Vec<f64>> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::spec(format!("beta must be positive, got {beta}")));
    }
    check_budget(n_paths, n_steps, horizon)?;
    let g = FbmGenerator::new(process.hurst(), n_steps, horizon)?;
    let dt = g.step();
    let weights: Vec<f64> = (0..=n_steps).map(|k| 1.0 / (1.0 + (k as f64 * dt).powf(beta))).collect();
    Ok(g.map_paths(n_paths, seed, workers, |p| {
        p.iter().zip(&weights).map(|(x, w)| x * w).fold(0.0, f64::max)
    }))
}

/// 𝔈_{α,β} for each α in `alphas`, from one set of paths.
#[allow(clippy::too_many_arguments)]
pub fn e_const_estimates(
    process: GaussianProcess,
    alphas: &[f64],
    beta: f64,
    horizon: f64,
    n_paths: usize,
    n_steps: usize,
    seed: u64,
    workers: usize,
) -> Result<Vec<Estimate>> {
    if let Some(a) = alphas.iter().find(|a| !(**a > 0.0 && a.is_finite())) {
        return Err(Error::spec(format!("alpha must be positive, got {a}")));
    }
    let sups = normalized_sups(process, beta, horizon, n_paths, n_steps, seed, workers)?;
    let h = process.hurst();
    let tail_scale = horizon.powf(h) / (1.0 + horizon.powf(beta));
    let truncation = format!(
        "sup truncated at T = {horizon}; X(T)/(1+T^beta) has sd {tail_scale:.3e}, decaying like t^(H-beta)"
    );
    let n_boot = 1000;
    let mut rng = stream(seed, BOOTSTRAP_STREAM);
    let resamples: Vec<Vec<usize>> =
        (0..n_boot).map(|_| (0..n_paths).map(|_| rng.random_range(0..n_paths)).collect()).collect();
    Ok(alphas
        .iter()
        .map(|&a| {
            let vals: Vec<f64> = sups.iter().map(|s| s.powf(a)).collect();
            let (value, se) = mean_se(&vals);
            let mut boot: Vec<f64> = resamples
                .iter()
                .map(|idx| idx.iter().map(|&i| vals[i]).sum::<f64>() / n_paths as f64)
                .collect();
            boot.sort_by(f64::total_cmp);
            let q = |p: f64| boot[((p * n_boot as f64) as usize).min(n_boot - 1)];
            Estimate {
                quantity: format!("E[{a},{beta}]"),
                value,
                ci_lo: q(0.025),
                ci_hi: q(0.975),
                std_error: se,
                n_paths,
                n_steps,
                horizon,
                method: "grid_sup_bootstrap".into(),
                label: ESTIMATED.into(),
                truncation: truncation.clone(),
                seed,
            }
        })
        .collect())
}

#[allow(clippy::too_many_arguments)]
pub fn e_const_estimate(
    process: GaussianProcess,
    alpha: f64,
    beta: f64,
    horizon: f64,
    n_paths: usize,
    n_steps: usize,
    seed: u64,
    workers: usize,
) -> Result<Estimate> {
    Ok(e_const_estimates(process, &[alpha], beta, horizon, n_paths, n_steps, seed, workers)?.remove(0))
}

/// Direct estimate of P(max_grid (X(t) − c t^β) > u) on [0, T].
#[allow(clippy::too_many_arguments)]
pub fn sup_exceedance(
    process: GaussianProcess,
    c: f64,
    beta: f64,
    horizon: f64,
    n_steps: usize,
    grid: &[f64],
    n_paths: usize,
    seed: u64,
    workers: usize,
) -> Result<Vec<TailEstimate>> {
    check_budget(n_paths, n_steps, horizon)?;
    let g = FbmGenerator::new(process.hurst(), n_steps, horizon)?;
    estimate_sf_with(|rng| g.running_sup(rng, |t| c * t.powf(beta)), grid, n_paths, seed, workers)
}

/// Horizon past which the trend η t^β exceeds u + 5 sd of X(t) = t^H Z.
pub fn truncation_horizon(hurst: f64, beta: f64, eta: f64, u: f64) -> Result<f64> {
    if !(eta > 0.0 && beta > hurst && u >= 0.0) {
        return Err(Error::spec("truncation needs eta > 0, beta > H, u >= 0"));
    }
    let gap = |t: f64| eta * t.powf(beta) - u - 5.0 * t.powf(hurst);
    let mut hi = 1.0;
    while gap(hi) <= 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gap(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}
