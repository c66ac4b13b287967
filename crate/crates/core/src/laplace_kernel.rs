//! Laplace-type integrals: numeric evaluation next to their leading-order
//! asymptotics.
//!
//! All values are natural logs. The integrals behind the mixed sum and
//! product tails are
//!
//! ```text
//! I(u) = ∫₀^δ z^μ (u+z)^β exp(−K(u+z)^α) dz
//! ```
//!
//! and the general form `∫₀^a x^(μ−1) f(x) exp(−u·S(x)) dx`.

use std::cell::Cell;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_log_breaks, QuadOptions};
use crate::special::{ln_gamma, log1m_exp};

/// Parameters of I(u; α, β, μ) with rate K.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    pub alpha: f64,
    pub beta: f64,
    pub mu: f64,
    #[serde(rename = "K")]
    pub k: f64,
}

impl KernelParams {
    pub fn new(alpha: f64, beta: f64, mu: f64, k: f64) -> Result<Self> {
        let p = KernelParams { alpha, beta, mu, k };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let ok = self.alpha > 0.0 && self.mu > 0.0 && self.k > 0.0 && self.beta.is_finite();
        if ok && self.alpha.is_finite() && self.mu.is_finite() && self.k.is_finite() {
            Ok(())
        } else {
            Err(Error::spec(format!("kernel needs alpha, mu, K > 0 and finite beta: {self:?}")))
        }
    }
}

/// (u+z)^α − u^α without cancellation.
fn power_gap(u: f64, z: f64, alpha: f64) -> f64 {
    if z < u {
        u.powf(alpha) * (alpha * (z / u).ln_1p()).exp_m1()
    } else {
        (u + z).powf(alpha) - u.powf(alpha)
    }
}

/// Geometric ladder of breakpoints around a peak of width `w`.
fn ladder(w: f64, upper: f64) -> Vec<f64> {
    (-2..=8).map(|k| w * 4f64.powi(k)).filter(|&b| b < upper).collect()
}

/// ln I(u) by adaptive quadrature; `delta` may be +∞.
pub fn integral_i_numeric(u: f64, p: &KernelParams, delta: f64) -> Result<f64> {
    p.validate()?;
    if !(u > 0.0) || u.is_infinite() {
        return Err(Error::domain(format!("I(u) needs u > 0, got {u}")));
    }
    if delta.is_nan() || delta < 0.0 {
        return Err(Error::domain(format!("delta must be nonnegative, got {delta}")));
    }
    if delta == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let KernelParams { alpha, beta, mu, k } = *p;
    let base = -k * u.powf(alpha);
    let log_f = |z: f64| {
        if z <= 0.0 {
            return f64::NEG_INFINITY;
        }
        mu * z.ln() + beta * (u + z).ln() - k * power_gap(u, z, alpha)
    };
    let width = 1.0 / (k * alpha * u.powf(alpha - 1.0)).max(1e-300);
    let q = integrate_log_breaks(log_f, 0.0, delta, &ladder(width, delta), &QuadOptions::with_tol(1e-10))?;
    Ok(base + q.log_value)
}

/// ln g(u) = ln[(Kα)^(−μ−1) Γ(μ+1) u^(β−(α−1)(μ+1)) e^(−Ku^α)].
pub fn integral_i_asymptotic(u: f64, p: &KernelParams) -> Result<f64> {
    p.validate()?;
    if !(p.alpha > 1.0) {
        return Err(Error::assumption("α > 1", format!("alpha = {}", p.alpha)));
    }
    if !(u > 0.0) {
        return Err(Error::domain(format!("g(u) needs u > 0, got {u}")));
    }
    let KernelParams { alpha, beta, mu, k } = *p;
    Ok(-(mu + 1.0) * (k * alpha).ln() + ln_gamma(mu + 1.0) + (beta - (alpha - 1.0) * (mu + 1.0)) * u.ln()
        - k * u.powf(alpha))
}

fn watson_args(u: f64, mu: f64) -> Result<()> {
    if !(u > 0.0) || u.is_infinite() {
        return Err(Error::domain(format!("Watson integral needs u > 0, got {u}")));
    }
    if !(mu > -1.0) || mu.is_infinite() {
        return Err(Error::spec(format!("Watson order must exceed -1, got {mu}")));
    }
    Ok(())
}

/// ln[Γ(μ+1) u^(−μ−1)].
pub fn watson_asymptotic(u: f64, mu: f64) -> Result<f64> {
    watson_args(u, mu)?;
    Ok(ln_gamma(mu + 1.0) - (mu + 1.0) * u.ln())
}

/// ln ∫₀^δ v^μ e^(−uv) dv by quadrature; `delta` may be +∞.
pub fn watson_numeric(u: f64, mu: f64, delta: f64) -> Result<f64> {
    watson_args(u, mu)?;
    if delta.is_nan() || delta < 0.0 {
        return Err(Error::domain(format!("delta must be nonnegative, got {delta}")));
    }
    if delta == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let log_f = |v: f64| if v <= 0.0 { f64::NEG_INFINITY } else { mu * v.ln() - u * v };
    let q = integrate_log_breaks(log_f, 0.0, delta, &ladder(1.0 / u, delta), &QuadOptions::with_tol(1e-12))?;
    Ok(q.log_value)
}

type RealFn = dyn Fn(f64) -> f64 + Send + Sync;

/// ∫₀^a x^(μ−1) f(x) e^(−u·S(x)) dx with S minimal only at 0.
#[derive(Clone)]
pub struct LaplaceProblem {
    f: Arc<RealFn>,
    s: Arc<RealFn>,
    mu: f64,
    a: f64,
    f0: f64,
    s0: f64,
    s_prime: f64,
}

impl std::fmt::Debug for LaplaceProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LaplaceProblem")
            .field("mu", &self.mu)
            .field("a", &self.a)
            .field("f0", &self.f0)
            .field("s0", &self.s0)
            .field("s_prime", &self.s_prime)
            .finish()
    }
}

/// Finite-difference step for S′(0).
pub const FD_STEP: f64 = 1e-6;

impl LaplaceProblem {
    pub fn new(
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        s: impl Fn(f64) -> f64 + Send + Sync + 'static,
        mu: f64,
        a: f64,
    ) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::spec(format!("mu must be positive, got {mu}")));
        }
        if !(a > 0.0) {
            return Err(Error::spec(format!("upper limit must be positive, got {a}")));
        }
        let f0 = f(0.0);
        if f0 == 0.0 || !f0.is_finite() {
            return Err(Error::assumption("f(0) ≠ 0", format!("f(0) = {f0}")));
        }
        let s0 = s(0.0);
        if !s0.is_finite() {
            return Err(Error::assumption("S continuous at 0", format!("S(0) = {s0}")));
        }
        let h = FD_STEP;
        let s_prime = (-3.0 * s0 + 4.0 * s(h) - s(2.0 * h)) / (2.0 * h);
        if !(s_prime > 1e-8) {
            return Err(Error::assumption("S′(0) > 0", format!("finite-difference S′(0) = {s_prime:e}")));
        }
        // Spot-check that the minimum sits at 0 alone.
        let top = if a.is_finite() { a } else { 1e6 };
        for i in 1..=400 {
            let x = if a.is_finite() { top * i as f64 / 400.0 } else { 1e-4 * 1e10f64.powf(i as f64 / 400.0) };
            if x > top {
                break;
            }
            let v = s(x);
            if !(v > s0) {
                return Err(Error::assumption(
                    "min S attained only at 0",
                    format!("S({x}) = {v} <= S(0) = {s0}"),
                ));
            }
        }
        Ok(LaplaceProblem { f: Arc::new(f), s: Arc::new(s), mu, a, f0, s0, s_prime })
    }

    /// Replaces the finite-difference S′(0) by an exact value.
    pub fn with_derivative(mut self, s_prime: f64) -> Result<Self> {
        if !(s_prime > 0.0) {
            return Err(Error::assumption("S′(0) > 0", format!("S′(0) = {s_prime}")));
        }
        self.s_prime = s_prime;
        Ok(self)
    }

    pub fn s_prime(&self) -> f64 {
        self.s_prime
    }
}

/// Numeric and asymptotic values, both as ln|·|. `sign` is the sign of
/// f(0), shared by both once u is large.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplaceEstimate {
    pub numeric: f64,
    pub asymptotic: f64,
    pub sign: f64,
}

impl LaplaceEstimate {
    pub fn ratio(&self) -> f64 {
        (self.numeric - self.asymptotic).exp()
    }
}

pub fn laplace_general(problem: &LaplaceProblem, u: f64) -> Result<LaplaceEstimate> {
    if !(u > 0.0) || u.is_infinite() {
        return Err(Error::domain(format!("Laplace parameter must be positive, got {u}")));
    }
    let LaplaceProblem { mu, a, f0, s0, s_prime, .. } = *problem;
    let sign = f0.signum();
    let saw_other_sign = Cell::new(false);
    let part = |want: f64| {
        let f = &problem.f;
        let s = &problem.s;
        let flag = &saw_other_sign;
        move |x: f64| {
            if x <= 0.0 {
                return f64::NEG_INFINITY;
            }
            let fx = f(x) * want;
            if fx <= 0.0 {
                if fx < 0.0 {
                    flag.set(true);
                }
                return f64::NEG_INFINITY;
            }
            (mu - 1.0) * x.ln() + fx.ln() - u * (s(x) - s0)
        }
    };
    let breaks = ladder(1.0 / (u * s_prime), a);
    let opts = QuadOptions::with_tol(1e-10);
    let main = integrate_log_breaks(part(sign), 0.0, a, &breaks, &opts)?.log_value;
    let mut numeric = main;
    if saw_other_sign.get() {
        let other = integrate_log_breaks(part(-sign), 0.0, a, &breaks, &opts)?.log_value;
        if other >= main {
            return Err(Error::Unsupported(
                "integral has the opposite sign of f(0); u is too small for the leading term".into(),
            ));
        }
        numeric = main + log1m_exp(other - main);
    }
    let asymptotic = ln_gamma(mu) + f0.abs().ln() - mu * s_prime.ln() - mu * u.ln();
    Ok(LaplaceEstimate { numeric: numeric - u * s0, asymptotic: asymptotic - u * s0, sign })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::gamma_lr;
    use approx::assert_relative_eq;

    #[test]
    fn exponential_kernel_closed_form() {
        let p = KernelParams::new(1.0, 0.0, 1.0, 1.0).unwrap();
        let d: f64 = 40.0;
        let want = -2.0 + (1.0 - (-d).exp() * (1.0 + d)).ln();
        assert_relative_eq!(integral_i_numeric(2.0, &p, d).unwrap(), want, max_relative = 1e-10);
    }

    #[test]
    fn near_zero_u() {
        let p = KernelParams::new(2.0, 0.0, 1.0, 1.0).unwrap();
        let want = ((1.0 - (-1f64).exp()) / 2.0).ln();
        assert_relative_eq!(integral_i_numeric(1e-300, &p, 1.0).unwrap(), want, max_relative = 1e-10);
    }

    #[test]
    fn empty_interval() {
        let p = KernelParams::new(2.0, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(integral_i_numeric(3.0, &p, 0.0).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn asymptotic_form() {
        let p = KernelParams::new(2.0, 0.0, 1.0, 1.0).unwrap();
        let want = -2.0 * 2f64.ln() - 2.0 * 15f64.ln() - 225.0;
        assert_relative_eq!(integral_i_asymptotic(15.0, &p).unwrap(), want, max_relative = 1e-14);
        let p = KernelParams::new(3.0, 0.5, 1.0, 0.7).unwrap();
        let g = integral_i_asymptotic(2.0, &p).unwrap();
        let coeff = g - (0.5 - 2.0 * 2.0) * 2f64.ln() + 0.7 * 8.0;
        assert_relative_eq!(coeff, -2.0 * (0.7f64 * 3.0).ln(), max_relative = 1e-13);
        let p = KernelParams::new(1.0, 0.0, 1.0, 1.0).unwrap();
        assert!(matches!(integral_i_asymptotic(15.0, &p), Err(Error::Assumption { .. })));
    }

    /// Ratios enter [0.95, 1.05] once K·u^α ≥ 150 and approach 1 monotonically.
    #[test]
    fn numeric_over_asymptotic_grid() {
        for alpha in [1.5, 2.0, 3.0] {
            for beta in [-1.0, 0.0, 2.0] {
                for mu in [0.5, 1.0, 2.0] {
                    let p = KernelParams::new(alpha, beta, mu, 1.0).unwrap();
                    let errs: Vec<f64> = [150.0, 300.0, 600.0, 1200.0, 2400.0]
                        .iter()
                        .map(|&e: &f64| {
                            let u = e.powf(1.0 / alpha);
                            let r = (integral_i_numeric(u, &p, 1.0).unwrap() - integral_i_asymptotic(u, &p).unwrap())
                                .exp();
                            assert!((0.95..=1.05).contains(&r), "{alpha} {beta} {mu} at K·u^α = {e}: {r}");
                            (r - 1.0).abs()
                        })
                        .collect();
                    assert!(errs[2] >= errs[3] && errs[3] >= errs[4], "{alpha} {beta} {mu}: {errs:?}");
                }
            }
        }
    }

    #[test]
    fn delta_independence() {
        let p = KernelParams::new(2.0, 0.0, 1.0, 1.0).unwrap();
        let vals: Vec<f64> = [0.5, 1.0, 2.0].iter().map(|&d| integral_i_numeric(15.0, &p, d).unwrap()).collect();
        for a in &vals {
            for b in &vals {
                assert!(((a - b).exp() - 1.0).abs() < 0.01);
            }
        }
    }

    #[test]
    fn watson_examples() {
        let r = (watson_numeric(100.0, 1.0, 1.0).unwrap() - watson_asymptotic(100.0, 1.0).unwrap()).exp();
        assert!((r - gamma_lr(2.0, 100.0)).abs() < 1e-6);
        for u in [0.5, 3.0, 40.0] {
            assert_relative_eq!(watson_numeric(u, 0.0, f64::INFINITY).unwrap(), -u.ln(), max_relative = 1e-10);
            assert_relative_eq!(watson_asymptotic(u, 0.0).unwrap(), -u.ln(), max_relative = 1e-14);
        }
        let err = |u: f64| (watson_numeric(u, 1.5, 1.0).unwrap() - watson_asymptotic(u, 1.5).unwrap()).exp_m1().abs();
        assert!(err(100.0) < err(10.0));
    }

    #[test]
    fn watson_matches_incomplete_gamma() {
        for (u, mu, d) in [(100.0, 1.5, 1.0), (3.0, 0.5, 2.0), (20.0, 4.0, 0.3)] {
            let r = (watson_numeric(u, mu, d).unwrap() - watson_asymptotic(u, mu).unwrap()).exp();
            assert_relative_eq!(r, gamma_lr(mu + 1.0, u * d), max_relative = 1e-9);
        }
    }

    #[test]
    fn laplace_trivial_case() {
        let p = LaplaceProblem::new(|_| 1.0, |x| x, 1.0, f64::INFINITY).unwrap();
        for u in [0.1, 1.0, 50.0] {
            let e = laplace_general(&p, u).unwrap();
            assert_relative_eq!(e.numeric, -u.ln(), max_relative = 1e-9);
            assert_relative_eq!(e.asymptotic, -u.ln(), max_relative = 1e-9);
        }
    }

    fn theorem3_problem(sigma: f64, k: f64, alpha: f64, beta: f64) -> LaplaceProblem {
        LaplaceProblem::new(
            move |z| (sigma - z).powf(beta),
            move |z| k * (sigma - z).powf(-alpha),
            2.0,
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn product_substitution_fixture() {
        let p = theorem3_problem(2.0, 1.0, 2.0, -3.0);
        assert_relative_eq!(p.s_prime(), 2.0 * 2f64.powf(-3.0), max_relative = 1e-8);
        let r = laplace_general(&p, 400.0).unwrap().ratio();
        assert!((0.98..=1.02).contains(&r), "{r}");
        let exact = p.clone().with_derivative(0.25).unwrap();
        let r2 = laplace_general(&exact, 400.0).unwrap().ratio();
        assert_relative_eq!(r, r2, max_relative = 1e-7);
    }

    #[test]
    fn shift_invariance() {
        let a = LaplaceProblem::new(|x: f64| 1.0 + x, |x: f64| x + x * x, 1.5, 2.0).unwrap();
        let b = LaplaceProblem::new(|x: f64| 1.0 + x, |x: f64| 1.0 + x + x * x, 1.5, 2.0).unwrap();
        for u in [5.0, 60.0] {
            let (ea, eb) = (laplace_general(&a, u).unwrap(), laplace_general(&b, u).unwrap());
            assert_relative_eq!(eb.numeric, ea.numeric - u, max_relative = 1e-10);
            assert_relative_eq!(eb.asymptotic, ea.asymptotic - u, max_relative = 1e-10);
            assert_relative_eq!(ea.ratio(), eb.ratio(), max_relative = 1e-8);
        }
    }

    #[test]
    fn matches_kernel_integral() {
        // I(u) is the general integral with f = (u+z)^β, S = K(u+z)^α, μ ↦ μ+1, at parameter 1.
        let (u0, alpha, beta, mu, k) = (3.0, 2.0, 1.0, 0.5, 0.7);
        let p = LaplaceProblem::new(
            move |z: f64| (u0 + z).powf(beta),
            move |z: f64| k * (u0 + z).powf(alpha),
            mu + 1.0,
            1.0,
        )
        .unwrap();
        let lap = laplace_general(&p, 1.0).unwrap().numeric;
        let ker = integral_i_numeric(u0, &KernelParams::new(alpha, beta, mu, k).unwrap(), 1.0).unwrap();
        assert_relative_eq!(lap, ker, max_relative = 1e-9);
    }

    #[test]
    fn invalid_problems() {
        assert!(matches!(LaplaceProblem::new(|_| 0.0, |x| x, 1.0, 1.0), Err(Error::Assumption { .. })));
        assert!(matches!(LaplaceProblem::new(|_| 1.0, |x| x * x, 1.0, 1.0), Err(Error::Assumption { .. })));
        assert!(matches!(
            LaplaceProblem::new(|_| 1.0, |x: f64| x * (x - 0.5).powi(2), 1.0, 1.0),
            Err(Error::Assumption { .. })
        ));
        assert!(LaplaceProblem::new(|_| 1.0, |x| x, 0.0, 1.0).is_err());
    }

    #[test]
    fn sign_changing_f() {
        // f(x) = 1 − 3x changes sign at 1/3; exact integral with S = x, μ = 1 on [0,1].
        let p = LaplaceProblem::new(|x: f64| 1.0 - 3.0 * x, |x| x, 1.0, 1.0).unwrap();
        let u: f64 = 20.0;
        let exact = (1.0 - (-u).exp()) / u - 3.0 * (1.0 - (-u).exp() * (1.0 + u)) / (u * u);
        let e = laplace_general(&p, u).unwrap();
        assert_relative_eq!(e.numeric, exact.ln(), max_relative = 1e-9);
    }
}
