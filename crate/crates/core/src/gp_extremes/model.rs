use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// Underlying Gaussian process.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProcessKind {
    /// Standard Brownian motion.
    Brownian,
    /// Fractional Brownian motion with the model's `H`.
    Fbm,
    /// Any process meeting the model's declared constants.
    Custom,
}

/// Lower-edge law of the random slope η: P(η < δ + x) ~ C_η x^μ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtaSpec {
    pub delta: f64,
    #[serde(rename = "C_eta")]
    pub c_eta: f64,
    pub mu: f64,
}

/// Lower tail of the random offset ζ.
///
/// With `delta0 = None` the tail is a power law, P(ζ < −u) ~ C_ζ u^(−γ);
/// otherwise P(ζ < δ₀ + x) ~ C_ζ x^γ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZetaSpec {
    #[serde(default)]
    pub delta0: Option<f64>,
    #[serde(rename = "C_zeta")]
    pub c_zeta: f64,
    pub gamma: f64,
}

/// Homogeneous limit constant D(s) = (s_ref / s)^α · D_ref.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LimitConstant {
    pub s_ref: f64,
    #[serde(rename = "D")]
    pub d_ref: f64,
}

impl LimitConstant {
    pub fn at(&self, s: f64, alpha_loc: f64) -> f64 {
        (self.s_ref / s).powf(alpha_loc) * self.d_ref
    }
}

/// sup_t (X(t) − η t^β − ζ) for a self-similar, locally stationary X.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrendModel {
    pub process: ProcessKind,
    #[serde(rename = "H")]
    pub h: f64,
    pub beta: f64,
    pub alpha_loc: f64,
    #[serde(rename = "D_ref")]
    pub limit: LimitConstant,
    #[serde(default)]
    pub eta: Option<EtaSpec>,
    #[serde(default)]
    pub zeta: Option<ZetaSpec>,
    /// Pickands constant for `alpha_loc`, when not known exactly.
    #[serde(default, rename = "pickands_H")]
    pub pickands: Option<f64>,
    /// E(sup X(t)/(1 + t^β))^(βμ/H), when not known exactly.
    #[serde(default)]
    pub e_const: Option<f64>,
}

impl TrendModel {
    /// Brownian motion with a linear trend: H = 1/2, β = 1, α = 1, D(s) = 1/s.
    pub fn brownian() -> Self {
        TrendModel {
            process: ProcessKind::Brownian,
            h: 0.5,
            beta: 1.0,
            alpha_loc: 1.0,
            limit: LimitConstant { s_ref: 1.0, d_ref: 1.0 },
            eta: None,
            zeta: None,
            pickands: None,
            e_const: None,
        }
    }

    /// Fractional Brownian motion: α = 2H, D(s) = s^(−2H).
    pub fn fbm(h: f64, beta: f64) -> Result<Self> {
        let m = TrendModel {
            process: ProcessKind::Fbm,
            h,
            beta,
            alpha_loc: 2.0 * h,
            limit: LimitConstant { s_ref: 1.0, d_ref: 1.0 },
            ..TrendModel::brownian()
        };
        m.validate()?;
        Ok(m)
    }

    pub fn with_eta(mut self, delta: f64, c_eta: f64, mu: f64) -> Self {
        self.eta = Some(EtaSpec { delta, c_eta, mu });
        self
    }

    pub fn with_pickands(mut self, value: f64) -> Self {
        self.pickands = Some(value);
        self
    }

    pub fn with_e_const(mut self, value: f64) -> Self {
        self.e_const = Some(value);
        self
    }

    pub fn with_zeta(mut self, delta0: Option<f64>, c_zeta: f64, gamma: f64) -> Self {
        self.zeta = Some(ZetaSpec { delta0, c_zeta, gamma });
        self
    }

    pub fn is_brownian(&self) -> bool {
        self.process == ProcessKind::Brownian
            || (self.process == ProcessKind::Fbm && self.h == 0.5 && self.alpha_loc == 1.0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Spec(m));
        if !(self.h > 0.0 && self.h < 1.0) {
            return bad(format!("H must lie in (0, 1), got {}", self.h));
        }
        if !(self.beta > self.h && self.beta.is_finite()) {
            return bad(format!("beta must exceed H = {}, got {}", self.h, self.beta));
        }
        if !(self.alpha_loc > 0.0 && self.alpha_loc <= 2.0) {
            return bad(format!("alpha_loc must lie in (0, 2], got {}", self.alpha_loc));
        }
        if !(self.limit.s_ref > 0.0 && self.limit.d_ref > 0.0 && self.limit.s_ref.is_finite() && self.limit.d_ref.is_finite()) {
            return bad("D_ref needs positive s_ref and D".into());
        }
        match self.process {
            ProcessKind::Brownian if self.h != 0.5 || self.alpha_loc != 1.0 => {
                return bad("the Brownian preset has H = 1/2 and alpha_loc = 1".into())
            }
            ProcessKind::Fbm if (self.alpha_loc - 2.0 * self.h).abs() > 1e-12 => {
                return bad(format!("fBm has alpha_loc = 2H = {}", 2.0 * self.h))
            }
            _ => {}
        }
        if let Some(e) = self.eta {
            if !(e.delta >= 0.0 && e.delta.is_finite() && e.c_eta > 0.0 && e.c_eta.is_finite() && e.mu > 0.0 && e.mu.is_finite()) {
                return bad(format!("eta needs delta >= 0, C_eta > 0, mu > 0: {e:?}"));
            }
        }
        if let Some(z) = self.zeta {
            let d_ok = z.delta0.is_none_or(f64::is_finite);
            if !(d_ok && z.c_zeta > 0.0 && z.c_zeta.is_finite() && z.gamma > 0.0 && z.gamma.is_finite()) {
                return bad(format!("zeta needs finite delta0 (or none), C_zeta > 0, gamma > 0: {z:?}"));
            }
        }
        for (name, v) in [("pickands_H", self.pickands), ("e_const", self.e_const)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return bad(format!("{name} must be positive, got {v}"));
                }
            }
        }
        Ok(())
    }

    /// Parses a model document. `"preset": "bm"` or `"preset": {"fbm": H,
    /// "beta": β}` fill the process fields; explicit fields override.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| Error::spec(format!("bad model JSON: {e}")))?;
        Self::from_json(v)
    }

    pub fn from_json(v: Value) -> Result<Self> {
        let Value::Object(mut obj) = v else {
            return Err(Error::spec("model must be a JSON object"));
        };
        if let Some(preset) = obj.remove("preset") {
            let base = match &preset {
                Value::String(s) if s == "bm" || s == "brownian" => TrendModel::brownian(),
                Value::Object(p) if p.contains_key("fbm") => {
                    let h = p["fbm"].as_f64().ok_or_else(|| Error::spec("fbm preset needs numeric H"))?;
                    let beta = p.get("beta").and_then(Value::as_f64).unwrap_or(1.0);
                    TrendModel::fbm(h, beta)?
                }
                other => return Err(Error::spec(format!("unknown preset {other}"))),
            };
            let Value::Object(mut full) = serde_json::to_value(base).expect("serializable") else {
                unreachable!()
            };
            for (k, val) in obj {
                full.insert(k, val);
            }
            obj = full;
        }
        let m: TrendModel =
            serde_json::from_value(Value::Object(obj)).map_err(|e| Error::spec(format!("bad model: {e}")))?;
        m.validate()?;
        Ok(m)
    }
}
