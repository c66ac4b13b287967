//! Tail families, exact reference laws and moments.
//!
//! [`AsymptoticTail`] is the closed family the calculus works in. A
//! [`DistributionModel`] is an exact law carrying its survival function in
//! log form, an optional density, a sampler and its declared tail.

mod model;
mod moments;
mod spec;
mod table;

pub use model::{make_model, DeclaredTail, DistributionModel, Support};
pub use moments::{moment, moment_by_quadrature};
pub use spec::DistSpec;
pub use table::{Method, RatioRow, RatioTable};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// SF(u) ~ C·u^(−alpha).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerTail {
    #[serde(rename = "C")]
    pub c: f64,
    pub alpha: f64,
}

/// SF(u) ~ C·u^rho·exp(−K·(u − shift)^alpha).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeibullTail {
    #[serde(rename = "C")]
    pub c: f64,
    pub rho: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub alpha: f64,
    pub shift: f64,
}

/// SF(u) ~ C·(sigma − u)^mu as u ↑ sigma.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdgeTail {
    #[serde(rename = "C")]
    pub c: f64,
    pub sigma: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum AsymptoticTail {
    PowerTail(PowerTail),
    WeibullType(WeibullTail),
    EdgePower(EdgeTail),
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::spec(format!("{name} must be a positive finite number, got {v}")))
    }
}

fn finite(name: &str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::spec(format!("{name} must be finite, got {v}")))
    }
}

impl PowerTail {
    pub fn new(c: f64, alpha: f64) -> Result<Self> {
        let t = PowerTail { c, alpha };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        positive("C", self.c)?;
        positive("alpha", self.alpha)
    }

    pub fn log_eval(&self, u: f64) -> Result<f64> {
        self.validate()?;
        if !(u > 0.0) || u.is_infinite() {
            return Err(Error::domain(format!("power tail evaluated at u = {u}; needs u > 0")));
        }
        Ok(self.c.ln() - self.alpha * u.ln())
    }
}

impl WeibullTail {
    pub fn new(c: f64, rho: f64, k: f64, alpha: f64, shift: f64) -> Result<Self> {
        let t = WeibullTail { c, rho, k, alpha, shift };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        positive("C", self.c)?;
        finite("rho", self.rho)?;
        positive("K", self.k)?;
        positive("alpha", self.alpha)?;
        finite("shift", self.shift)
    }

    pub fn log_eval(&self, u: f64) -> Result<f64> {
        self.validate()?;
        if !(u > self.shift) || u.is_infinite() {
            return Err(Error::domain(format!(
                "Weibull-type tail evaluated at u = {u}; needs u > shift = {}",
                self.shift
            )));
        }
        let power = if self.rho == 0.0 {
            0.0
        } else if u > 0.0 {
            self.rho * u.ln()
        } else {
            return Err(Error::domain(format!("u^rho undefined at u = {u} for rho = {}", self.rho)));
        };
        Ok(self.c.ln() + power - self.k * (u - self.shift).powf(self.alpha))
    }
}

impl EdgeTail {
    pub fn new(c: f64, sigma: f64, mu: f64) -> Result<Self> {
        let t = EdgeTail { c, sigma, mu };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        positive("C", self.c)?;
        finite("sigma", self.sigma)?;
        positive("mu", self.mu)
    }

    pub fn log_eval(&self, u: f64) -> Result<f64> {
        self.validate()?;
        if !(u < self.sigma) || u.is_infinite() {
            return Err(Error::domain(format!(
                "edge tail evaluated at u = {u}; needs u < sigma = {}",
                self.sigma
            )));
        }
        Ok(self.c.ln() + self.mu * (self.sigma - u).ln())
    }
}

impl AsymptoticTail {
    pub fn validate(&self) -> Result<()> {
        match self {
            AsymptoticTail::PowerTail(t) => t.validate(),
            AsymptoticTail::WeibullType(t) => t.validate(),
            AsymptoticTail::EdgePower(t) => t.validate(),
        }
    }

    /// ln h(u).
    pub fn log_eval(&self, u: f64) -> Result<f64> {
        match self {
            AsymptoticTail::PowerTail(t) => t.log_eval(u),
            AsymptoticTail::WeibullType(t) => t.log_eval(u),
            AsymptoticTail::EdgePower(t) => t.log_eval(u),
        }
    }

    pub fn ess_sup(&self) -> f64 {
        match self {
            AsymptoticTail::EdgePower(t) => t.sigma,
            _ => f64::INFINITY,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            AsymptoticTail::PowerTail(_) => "PowerTail",
            AsymptoticTail::WeibullType(_) => "WeibullType",
            AsymptoticTail::EdgePower(_) => "EdgePower",
        }
    }

    /// Named numeric fields in declaration order.
    pub fn fields(&self) -> Vec<(&'static str, f64)> {
        match *self {
            AsymptoticTail::PowerTail(t) => vec![("C", t.c), ("alpha", t.alpha)],
            AsymptoticTail::WeibullType(t) => {
                vec![("C", t.c), ("rho", t.rho), ("K", t.k), ("alpha", t.alpha), ("shift", t.shift)]
            }
            AsymptoticTail::EdgePower(t) => vec![("C", t.c), ("sigma", t.sigma), ("mu", t.mu)],
        }
    }

    /// Largest field-wise discrepancy `|a − b| / max(1, |b|)`; `None` when
    /// the variants differ.
    pub fn field_distance(&self, other: &AsymptoticTail) -> Option<f64> {
        if std::mem::discriminant(self) != std::mem::discriminant(other) {
            return None;
        }
        let d = self
            .fields()
            .iter()
            .zip(other.fields())
            .map(|(&(_, a), (_, b))| (a - b).abs() / b.abs().max(1.0))
            .fold(0.0, f64::max);
        Some(d)
    }
}

impl From<PowerTail> for AsymptoticTail {
    fn from(t: PowerTail) -> Self {
        AsymptoticTail::PowerTail(t)
    }
}

impl From<WeibullTail> for AsymptoticTail {
    fn from(t: WeibullTail) -> Self {
        AsymptoticTail::WeibullType(t)
    }
}

impl From<EdgeTail> for AsymptoticTail {
    fn from(t: EdgeTail) -> Self {
        AsymptoticTail::EdgePower(t)
    }
}

/// ln h(u) for the given tail.
pub fn sf_eval(tail: &AsymptoticTail, u: f64) -> Result<f64> {
    tail.log_eval(u)
}
