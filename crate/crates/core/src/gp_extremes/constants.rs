use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::model::TrendModel;
use crate::error::{Error, Result};
use crate::special::{ln_std_normal_pdf, ln_std_normal_sf};

pub use crate::special::{std_normal_pdf, std_normal_sf as std_normal_tail};

/// Where a Pickands constant came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PickandsSource {
    Exact,
    Supplied,
    /// α = 2 does not use H_α.
    NotNeeded,
}

/// Constants of the deterministic-trend asymptotics at slope `c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HPConstants {
    pub c: f64,
    pub s0: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    /// Prefactor of the Ψ-form.
    #[serde(rename = "C")]
    pub c_f: f64,
    #[serde(rename = "D_s0")]
    pub d_s0: f64,
    #[serde(rename = "K_s")]
    pub k_s: f64,
    #[serde(rename = "K_A")]
    pub k_a: f64,
    #[serde(rename = "K_B")]
    pub k_b: f64,
    #[serde(rename = "K_D")]
    pub k_d: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "pickands_H")]
    pub pickands: Option<f64>,
    pub pickands_source: PickandsSource,
}

/// Exact Pickands constants: H₁ = 1, H₂ = 1/√π.
pub fn pickands_exact(alpha: f64) -> Option<f64> {
    if alpha == 1.0 {
        Some(1.0)
    } else if alpha == 2.0 {
        Some(1.0 / PI.sqrt())
    } else {
        None
    }
}

fn resolve_pickands(model: &TrendModel) -> Result<(Option<f64>, PickandsSource)> {
    if model.alpha_loc == 2.0 {
        return Ok((pickands_exact(2.0), PickandsSource::NotNeeded));
    }
    if let Some(v) = pickands_exact(model.alpha_loc) {
        return Ok((Some(v), PickandsSource::Exact));
    }
    match model.pickands {
        Some(v) => Ok((Some(v), PickandsSource::Supplied)),
        None => Err(Error::MissingPickands { alpha: model.alpha_loc }),
    }
}

pub fn hp_constants(model: &TrendModel, c: f64) -> Result<HPConstants> {
    model.validate()?;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::spec(format!("trend slope c must be positive, got {c}")));
    }
    let (h, beta, alpha) = (model.h, model.beta, model.alpha_loc);
    let (pickands, pickands_source) = resolve_pickands(model)?;

    let r = h / (beta - h);
    let k_s = r.powf(1.0 / beta);
    let k_a = r.powf(-h / beta) * beta / (beta - h);
    let k_b = r.powf(-(h + 2.0) / beta) * h * beta;
    let k_d = model.limit.at(k_s, alpha);

    let s0 = k_s * c.powf(-1.0 / beta);
    let a = k_a * c.powf(h / beta);
    let b = k_b * c.powf((h + 2.0) / beta);
    let d_s0 = k_d * c.powf(alpha / beta);

    let (c_f, k) = if alpha < 2.0 {
        let hp = pickands.expect("resolved above");
        let tw = 2f64.powf(1.0 / alpha - 0.5);
        let c_f = hp * PI.sqrt() * d_s0.powf(1.0 / alpha) / (b.sqrt() * tw) * a.powf(2.0 / alpha - 0.5);
        let k = hp * PI.sqrt() * k_d.powf(1.0 / alpha) / (k_b.sqrt() * tw) * k_a.powf(2.0 / alpha - 1.5);
        (c_f, k)
    } else {
        let c_f = 2.0 * ((a * d_s0 + b) / b).sqrt();
        let k = 2.0 / k_a * ((k_a * k_d + k_b) / k_b).sqrt();
        (c_f, k)
    };

    Ok(HPConstants { c, s0, a, b, c_f, d_s0, k_s, k_a, k_b, k_d, k, pickands, pickands_source })
}

/// Both forms of P(sup (X(t) − c t^β) > u), as logarithms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendTail {
    pub u: f64,
    pub log_f: f64,
    pub log_g: f64,
}

impl TrendTail {
    pub fn ratio(&self) -> f64 {
        (self.log_f - self.log_g).exp()
    }
}

pub fn trend_tail_asymptotic(model: &TrendModel, c: f64, u: f64) -> Result<TrendTail> {
    if !(u > 0.0 && u.is_finite()) {
        return Err(Error::domain(format!("u must be positive, got {u}")));
    }
    let k = hp_constants(model, c)?;
    Ok(TrendTail { u, log_f: log_f_form(model, &k, u), log_g: log_g_form(model, &k, u) })
}

fn log_f_form(m: &TrendModel, k: &HPConstants, u: f64) -> f64 {
    let e = 1.0 - m.h / m.beta;
    let lu = u.ln();
    let arg = k.a * (e * lu).exp();
    if m.alpha_loc < 2.0 {
        k.c_f.ln() + e * (2.0 / m.alpha_loc - 1.0) * lu + ln_std_normal_sf(arg)
    } else {
        k.c_f.ln() + ln_std_normal_sf(arg)
    }
}

fn log_g_form(m: &TrendModel, k: &HPConstants, u: f64) -> f64 {
    let hb = m.h / m.beta;
    let e = 1.0 - hb;
    let p = 2.0 / m.alpha_loc - 2.0;
    let lu = u.ln();
    let lc = k.c.ln();
    let arg = k.k_a * (hb * lc + e * lu).exp();
    k.k.ln() + hb * p * lc + e * p * lu + ln_std_normal_pdf(arg)
}
