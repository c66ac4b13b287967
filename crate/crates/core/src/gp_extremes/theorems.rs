use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::constants::hp_constants;
use super::model::{EtaSpec, TrendModel, ZetaSpec};
use crate::asymptotic_engine::{product_mixed_tail, sum_mixed_tail};
use crate::error::{Error, Result};
use crate::special::{gamma, ln_gamma};
use crate::tail_model::{AsymptoticTail, EdgeTail, PowerTail, WeibullTail};

/// Where an 𝔈 constant came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EConstSource {
    Supplied,
    /// 𝔈_{a,1} = 2^(−a/2) Γ(a/2 + 1) for Brownian motion.
    BrownianClosedForm,
}

/// 𝔈_{a,1} for standard Brownian motion.
pub fn e_const_brownian(a: f64) -> f64 {
    2f64.powf(-a / 2.0) * gamma(a / 2.0 + 1.0)
}

/// Order βμ/H of the 𝔈 constant entering the δ = 0 tail.
pub fn e_const_order(model: &TrendModel, mu: f64) -> f64 {
    model.beta * mu / model.h
}

pub fn resolve_e_const(model: &TrendModel, mu: f64) -> Result<(f64, EConstSource)> {
    if let Some(v) = model.e_const {
        return Ok((v, EConstSource::Supplied));
    }
    if model.is_brownian() && model.beta == 1.0 {
        return Ok((e_const_brownian(e_const_order(model, mu)), EConstSource::BrownianClosedForm));
    }
    Err(Error::MissingEConstant(format!(
        "E_{{{}, {}}} is not known in closed form for this process; supply e_const or estimate it",
        e_const_order(model, mu),
        model.beta
    )))
}

fn eta_of(model: &TrendModel) -> Result<EtaSpec> {
    model.validate()?;
    model.eta.ok_or_else(|| Error::spec("the model has no eta"))
}

/// Tail of sup_t (X(t) − η t^β).
pub fn theorem5_tail(model: &TrendModel) -> Result<AsymptoticTail> {
    let eta = eta_of(model)?;
    let (h, beta, alpha) = (model.h, model.beta, model.alpha_loc);
    if eta.delta == 0.0 {
        let (e, _) = resolve_e_const(model, eta.mu)?;
        return Ok(PowerTail::new(eta.c_eta * e, eta.mu * (beta - h) / h)?.into());
    }
    let k = hp_constants(model, 1.0)?;
    let hb = h / beta;
    let (mu, d) = (eta.mu, eta.delta);
    let ln_k0 = eta.c_eta.ln() + k.k.ln() + ln_gamma(mu + 1.0) + mu * beta.ln()
        - 2.0 * mu * k.k_a.ln()
        - mu * h.ln()
        + (hb * (2.0 / alpha - 2.0) - mu * (2.0 * hb - 1.0)) * d.ln();
    let nu = (1.0 - hb) * (2.0 / alpha - 2.0 - 2.0 * mu);
    let kk = k.k_a * k.k_a * d.powf(2.0 * hb) / 2.0;
    Ok(WeibullTail::new((ln_k0 - 0.5 * (2.0 * PI).ln()).exp(), nu, kk, 2.0 * (1.0 - hb), 0.0)?.into())
}

/// The δ > 0 tail rebuilt from the product rule for M^(1−H/β)·η^(−H/β),
/// M being the supremum under a unit deterministic trend.
pub fn theorem5_by_composition(model: &TrendModel) -> Result<WeibullTail> {
    let eta = eta_of(model)?;
    if eta.delta <= 0.0 {
        return Err(Error::assumption("δ > 0", "the composition needs a positive lower edge of eta"));
    }
    let k = hp_constants(model, 1.0)?;
    let hb = model.h / model.beta;
    let x = WeibullTail::new(
        k.k / (2.0 * PI).sqrt(),
        2.0 / model.alpha_loc - 2.0,
        k.k_a * k.k_a / 2.0,
        2.0,
        0.0,
    )?;
    let y = EdgeTail::new(
        eta.c_eta * (model.beta / model.h * eta.delta.powf(1.0 + hb)).powf(eta.mu),
        eta.delta.powf(-hb),
        eta.mu,
    )?;
    let w = product_mixed_tail(&x, &y)?;
    let e = 1.0 - hb;
    WeibullTail::new(w.c, w.rho * e, w.k, w.alpha * e, 0.0)
}

/// Which branch of the random-offset result applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Theorem6Case {
    /// δ > 0, ζ with a power lower tail: ζ dominates.
    PowerOffsetPositiveDelta,
    /// δ = 0 and the offset tail is heavier.
    PowerOffsetDominates,
    /// δ = 0 and the supremum tail is heavier.
    SupremumDominates,
    /// ζ bounded below, δ > 0, 2H < β.
    BoundedOffset,
}

impl Theorem6Case {
    pub fn label(self) -> &'static str {
        match self {
            Theorem6Case::PowerOffsetPositiveDelta => "1(a)",
            Theorem6Case::PowerOffsetDominates => "1(b)",
            Theorem6Case::SupremumDominates => "1(c)",
            Theorem6Case::BoundedOffset => "2",
        }
    }
}

fn zeta_of(model: &TrendModel) -> Result<ZetaSpec> {
    model.validate()?;
    model.zeta.ok_or_else(|| Error::spec("the model has no zeta"))
}

pub fn theorem6_case(model: &TrendModel) -> Result<Theorem6Case> {
    let eta = eta_of(model)?;
    let zeta = zeta_of(model)?;
    match zeta.delta0 {
        None if eta.delta > 0.0 => Ok(Theorem6Case::PowerOffsetPositiveDelta),
        None => {
            let e = eta.mu * (model.beta - model.h) / model.h;
            if e > zeta.gamma {
                Ok(Theorem6Case::PowerOffsetDominates)
            } else if e < zeta.gamma {
                Ok(Theorem6Case::SupremumDominates)
            } else {
                Err(Error::BoundaryCase(format!(
                    "mu(beta - H)/H = gamma = {e}: neither tail dominates"
                )))
            }
        }
        Some(_) if eta.delta <= 0.0 => {
            Err(Error::assumption("δ > 0", "a bounded-below zeta needs eta bounded away from 0"))
        }
        Some(_) if 2.0 * model.h >= model.beta => Err(Error::assumption(
            "2H < β",
            format!("2H = {} and beta = {}", 2.0 * model.h, model.beta),
        )),
        Some(_) => Ok(Theorem6Case::BoundedOffset),
    }
}

/// Tail of sup_t (X(t) − η t^β − ζ).
pub fn theorem6_tail(model: &TrendModel) -> Result<AsymptoticTail> {
    let zeta = zeta_of(model)?;
    match theorem6_case(model)? {
        Theorem6Case::PowerOffsetPositiveDelta | Theorem6Case::PowerOffsetDominates => {
            Ok(PowerTail::new(zeta.c_zeta, zeta.gamma)?.into())
        }
        Theorem6Case::SupremumDominates => theorem5_tail(model),
        Theorem6Case::BoundedOffset => {
            let AsymptoticTail::WeibullType(x) = theorem5_tail(model)? else {
                unreachable!("delta > 0 gives a Weibull-type tail")
            };
            let y = EdgeTail::new(zeta.c_zeta, -zeta.delta0.expect("bounded case"), zeta.gamma)?;
            Ok(sum_mixed_tail(&x, &y)?.into())
        }
    }
}
