use std::cell::RefCell;

use super::model::{EtaSpec, TrendModel, ZetaSpec};
use super::theorems::{theorem5_tail, theorem6_case, Theorem6Case};
use crate::error::{Error, Result};
use crate::montecarlo::{conditional_mean_with, TailEstimate};
use crate::oracle::{log_expectation, sf_sum_exact};
use crate::tail_model::{AsymptoticTail, DistSpec, DistributionModel, EdgeTail};

/// Law with P(η < δ + x) = C_η x^μ exactly near the edge.
pub fn eta_law(eta: &EtaSpec) -> Result<DistributionModel> {
    DistSpec::LowerPower { delta: eta.delta, c: eta.c_eta, mu: eta.mu }.model()
}

/// Law of ζ matching its declared lower tail exactly.
pub fn zeta_law(zeta: &ZetaSpec) -> Result<DistributionModel> {
    match zeta.delta0 {
        None => DistSpec::NegPareto { c: zeta.c_zeta, alpha: zeta.gamma }.model(),
        Some(d0) => DistSpec::LowerPower { delta: d0, c: zeta.c_zeta, mu: zeta.gamma }.model(),
    }
}

fn log_sf_given(eta: f64, shifted: f64) -> f64 {
    if shifted <= 0.0 {
        0.0
    } else {
        -2.0 * eta * shifted
    }
}

/// ln P(sup_t (B(t) − η t − ζ) > u), exactly, for independent η > 0 and ζ.
///
/// Given (η, ζ) the supremum is exponential with rate 2η, so the survival
/// function is E min(1, e^(−2η(u + ζ))).
pub fn bm_exact_oracle(eta: &DistributionModel, zeta: Option<&DistributionModel>, u: f64) -> Result<f64> {
    if u.is_nan() {
        return Err(Error::domain("u is NaN"));
    }
    let lo = eta.support().lo;
    if lo < 0.0 || (lo == 0.0 && eta.atom() == Some(0.0)) {
        return Err(Error::domain(format!("{} must be positive almost surely", eta.label())));
    }
    let failure = RefCell::new(None);
    let inner = |e: f64| -> f64 {
        match zeta {
            None => log_sf_given(e, u),
            Some(z) => log_expectation(z, |v| log_sf_given(e, u + v), &[-u]).unwrap_or_else(|err| {
                failure.borrow_mut().get_or_insert(err);
                f64::NAN
            }),
        }
    };
    let v = log_expectation(eta, inner, &[]);
    match failure.into_inner() {
        Some(err) => Err(err),
        None => v,
    }
}

/// [`bm_exact_oracle`] with the laws built from a Brownian model's specs.
pub fn bm_exact_oracle_for(model: &TrendModel, u: f64) -> Result<f64> {
    require_brownian(model)?;
    let eta = eta_law(&model.eta.ok_or_else(|| Error::spec("the model has no eta"))?)?;
    let zeta = model.zeta.as_ref().map(zeta_law).transpose()?;
    bm_exact_oracle(&eta, zeta.as_ref(), u)
}

fn require_brownian(model: &TrendModel) -> Result<()> {
    model.validate()?;
    if !(model.is_brownian() && model.beta == 1.0) {
        return Err(Error::Unsupported("the exact oracle needs Brownian motion with a linear trend".into()));
    }
    Ok(())
}

/// Rao–Blackwellized estimate of the same probability: draws (η, ζ) and
/// averages the conditional survival function.
pub fn bm_conditional_mc(
    eta: &DistributionModel,
    zeta: Option<&DistributionModel>,
    grid: &[f64],
    n: usize,
    seed: u64,
    workers: usize,
) -> Result<Vec<TailEstimate>> {
    conditional_mean_with(
        |rng| {
            let e = eta.sample(rng);
            let z = zeta.map_or(0.0, |z| z.sample(rng));
            (e, z)
        },
        |&(e, z), u| log_sf_given(e, u + z).exp(),
        grid,
        n,
        seed,
        workers,
    )
}

/// ln P(S₀ − ζ > u) with S₀ replaced by the exact law of its tail
/// asymptotic, for the bounded-offset case. This checks the offset step
/// without the process layer.
pub fn bounded_offset_surrogate_oracle(model: &TrendModel, u: f64) -> Result<f64> {
    if theorem6_case(model)? != Theorem6Case::BoundedOffset {
        return Err(Error::spec("the surrogate oracle covers the bounded-offset case only"));
    }
    let zeta = model.zeta.expect("checked by the case selector");
    let x = DistributionModel::tail_exact(&theorem5_tail(model)?)?;
    let neg_zeta: AsymptoticTail =
        EdgeTail::new(zeta.c_zeta, -zeta.delta0.expect("bounded case"), zeta.gamma)?.into();
    let y = DistributionModel::tail_exact(&neg_zeta)?;
    sf_sum_exact(&x, &y, u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tail_model::make_model;
    use approx::assert_relative_eq;

    #[test]
    fn constant_slope() {
        let eta = make_model("constant(0.7)").unwrap();
        for u in [0.0, 1.0, 40.0] {
            assert_relative_eq!(bm_exact_oracle(&eta, None, u).unwrap(), -1.4 * u, epsilon = 1e-14);
        }
    }

    #[test]
    fn uniform_slope() {
        let eta = eta_law(&EtaSpec { delta: 0.0, c_eta: 1.0, mu: 1.0 }).unwrap();
        let v = bm_exact_oracle(&eta, None, 50.0).unwrap().exp();
        assert!((v / 0.01 - 1.0).abs() < 0.02, "{v}");
        assert_relative_eq!(v, (1.0 - (-100f64).exp()) / 100.0, max_relative = 1e-9);
    }

    #[test]
    fn constant_offset_shifts() {
        let eta = eta_law(&EtaSpec { delta: 0.2, c_eta: 1.0, mu: 2.0 }).unwrap();
        let z = make_model("constant(1.5)").unwrap();
        for u in [0.5, 3.0, 20.0] {
            let a = bm_exact_oracle(&eta, Some(&z), u).unwrap();
            let b = bm_exact_oracle(&eta, None, u + 1.5).unwrap();
            assert_relative_eq!(a, b, max_relative = 1e-12);
        }
    }

    #[test]
    fn negative_offset_caps_at_one() {
        let eta = make_model("constant(1)").unwrap();
        let z = make_model("constant(-3)").unwrap();
        assert_eq!(bm_exact_oracle(&eta, Some(&z), 2.0).unwrap(), 0.0);
    }

    #[test]
    fn power_offset_against_mc() {
        let m = TrendModel::brownian().with_eta(0.0, 1.0, 1.0).with_zeta(None, 1.0, 3.0);
        let eta = eta_law(&m.eta.unwrap()).unwrap();
        let zeta = zeta_law(&m.zeta.unwrap()).unwrap();
        let grid = [1.0, 5.0, 20.0];
        let mc = bm_conditional_mc(&eta, Some(&zeta), &grid, 200_000, 3, 1).unwrap();
        for e in mc {
            let truth = bm_exact_oracle_for(&m, e.u).unwrap().exp();
            let z99 = 2.576;
            assert!((e.p_hat - truth).abs() < z99 * e.std_error + 1e-12, "{e:?} vs {truth}");
        }
    }

    #[test]
    fn non_brownian_rejected() {
        let m = TrendModel::fbm(0.7, 1.0).unwrap().with_eta(0.0, 1.0, 1.0);
        assert!(matches!(bm_exact_oracle_for(&m, 1.0), Err(Error::Unsupported(_))));
    }
}
