use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Map, Value};

use crate::error::{Error, Result};

/// A registry law with its parameters.
///
/// Textual forms: `weibull(1,2)`, `weibull(K=1,alpha=2)`,
/// `weibull:K=1,alpha=2`, `normal`, or the JSON object
/// `{"family": "weibull", "params": {"K": 1, "alpha": 2}}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DistSpec {
    /// SF(u) = exp(−K·u^alpha), u ≥ 0.
    Weibull { k: f64, alpha: f64 },
    /// SF(u) = min(1, C·u^(−alpha)).
    Pareto { c: f64, alpha: f64 },
    /// SF(u) = (sigma − u)^mu on [sigma − 1, sigma].
    Edge { sigma: f64, mu: f64 },
    Lognormal { m: f64, s: f64 },
    Normal,
    Constant { c: f64 },
    /// P(X ≤ delta + x) = C·x^mu near the lower endpoint delta.
    LowerPower { delta: f64, c: f64, mu: f64 },
    /// P(X < −u) = min(1, C·u^(−alpha)); mirror image of `pareto`.
    NegPareto { c: f64, alpha: f64 },
}

impl DistSpec {
    pub fn family(&self) -> &'static str {
        match self {
            DistSpec::Weibull { .. } => "weibull",
            DistSpec::Pareto { .. } => "pareto",
            DistSpec::Edge { .. } => "edge",
            DistSpec::Lognormal { .. } => "lognormal",
            DistSpec::Normal => "normal",
            DistSpec::Constant { .. } => "constant",
            DistSpec::LowerPower { .. } => "lower_power",
            DistSpec::NegPareto { .. } => "neg_pareto",
        }
    }

    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            DistSpec::Weibull { k, alpha } => vec![("K", k), ("alpha", alpha)],
            DistSpec::Pareto { c, alpha } => vec![("C", c), ("alpha", alpha)],
            DistSpec::Edge { sigma, mu } => vec![("sigma", sigma), ("mu", mu)],
            DistSpec::Lognormal { m, s } => vec![("m", m), ("s", s)],
            DistSpec::Normal => vec![],
            DistSpec::Constant { c } => vec![("c", c)],
            DistSpec::LowerPower { delta, c, mu } => vec![("delta", delta), ("C", c), ("mu", mu)],
            DistSpec::NegPareto { c, alpha } => vec![("C", c), ("alpha", alpha)],
        }
    }

    fn param_names(family: &str) -> Option<&'static [&'static str]> {
        Some(match family {
            "weibull" => &["K", "alpha"],
            "pareto" => &["C", "alpha"],
            "edge" => &["sigma", "mu"],
            "lognormal" => &["m", "s"],
            "normal" => &[],
            "constant" => &["c"],
            "lower_power" => &["delta", "C", "mu"],
            "neg_pareto" => &["C", "alpha"],
            _ => return None,
        })
    }

    /// Builds and validates a spec from a family name and parameter list.
    /// Unnamed entries are matched by position.
    pub fn from_parts(family: &str, args: &[(Option<String>, f64)]) -> Result<Self> {
        let fam = family.trim().to_ascii_lowercase();
        let names = Self::param_names(&fam).ok_or_else(|| Error::spec(format!("unknown family `{family}`")))?;
        if args.len() != names.len() {
            return Err(Error::spec(format!(
                "`{fam}` takes {} parameter(s) ({}), got {}",
                names.len(),
                names.join(", "),
                args.len()
            )));
        }
        let mut vals = vec![None; names.len()];
        for (pos, (name, v)) in args.iter().enumerate() {
            let slot = match name {
                None => pos,
                Some(n) => names
                    .iter()
                    .position(|want| *want == n.as_str())
                    .or_else(|| names.iter().position(|want| want.eq_ignore_ascii_case(n)))
                    .ok_or_else(|| Error::spec(format!("`{fam}` has no parameter `{n}`")))?,
            };
            if vals[slot].is_some() {
                return Err(Error::spec(format!("parameter `{}` given twice", names[slot])));
            }
            vals[slot] = Some(*v);
        }
        let p: Vec<f64> = vals.into_iter().map(|v| v.unwrap()).collect();
        let spec = match fam.as_str() {
            "weibull" => DistSpec::Weibull { k: p[0], alpha: p[1] },
            "pareto" => DistSpec::Pareto { c: p[0], alpha: p[1] },
            "edge" => DistSpec::Edge { sigma: p[0], mu: p[1] },
            "lognormal" => DistSpec::Lognormal { m: p[0], s: p[1] },
            "normal" => DistSpec::Normal,
            "constant" => DistSpec::Constant { c: p[0] },
            "lower_power" => DistSpec::LowerPower { delta: p[0], c: p[1], mu: p[2] },
            "neg_pareto" => DistSpec::NegPareto { c: p[0], alpha: p[1] },
            _ => unreachable!(),
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.params() {
            if !v.is_finite() {
                return Err(Error::spec(format!("{}: {name} must be finite, got {v}", self.family())));
            }
        }
        let pos = |name: &str, v: f64| {
            if v > 0.0 {
                Ok(())
            } else {
                Err(Error::spec(format!("{}: {name} must be positive, got {v}", self.family())))
            }
        };
        match *self {
            DistSpec::Weibull { k, alpha } => pos("K", k).and(pos("alpha", alpha)),
            DistSpec::Pareto { c, alpha } | DistSpec::NegPareto { c, alpha } => pos("C", c).and(pos("alpha", alpha)),
            DistSpec::Edge { mu, .. } => pos("mu", mu),
            DistSpec::Lognormal { s, .. } => pos("s", s),
            DistSpec::LowerPower { c, mu, .. } => pos("C", c).and(pos("mu", mu)),
            DistSpec::Normal | DistSpec::Constant { .. } => Ok(()),
        }
    }

    /// Parses the mini-language or a JSON object.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t.starts_with('{') {
            let v: Value = serde_json::from_str(t).map_err(|e| Error::spec(format!("bad JSON spec: {e}")))?;
            return Self::from_json(&v);
        }
        let (family, body) = if let Some(open) = t.find('(') {
            let close = t
                .rfind(')')
                .filter(|&c| c > open && t[c + 1..].trim().is_empty())
                .ok_or_else(|| Error::spec(format!("unbalanced parentheses in `{t}`")))?;
            (&t[..open], &t[open + 1..close])
        } else if let Some(colon) = t.find(':') {
            (&t[..colon], &t[colon + 1..])
        } else {
            (t, "")
        };
        let family = family.trim();
        if family.is_empty() || !family.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(Error::spec(format!("bad family name in `{t}`")));
        }
        let mut args = Vec::new();
        for item in body.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, val) = match item.split_once('=') {
                Some((n, v)) => (Some(n.trim().to_string()), v.trim()),
                None => (None, item),
            };
            let v: f64 = val.parse().map_err(|_| Error::spec(format!("`{val}` is not a number")))?;
            args.push((name, v));
        }
        Self::from_parts(family, &args)
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::spec("spec must be a JSON object"))?;
        let family = obj
            .get("family")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::spec("spec needs a string `family`"))?;
        let mut args = Vec::new();
        match obj.get("params") {
            None | Some(Value::Null) => {}
            Some(Value::Object(m)) => {
                for (k, val) in m {
                    let x = val.as_f64().ok_or_else(|| Error::spec(format!("param `{k}` is not a number")))?;
                    args.push((Some(k.clone()), x));
                }
            }
            Some(Value::Array(a)) => {
                for val in a {
                    let x = val.as_f64().ok_or_else(|| Error::spec("positional param is not a number"))?;
                    args.push((None, x));
                }
            }
            Some(_) => return Err(Error::spec("`params` must be an object or array")),
        }
        Self::from_parts(family, &args)
    }

    pub fn to_json(&self) -> Value {
        let mut params = Map::new();
        for (k, v) in self.params() {
            params.insert(k.to_string(), Value::from(v));
        }
        let mut obj = Map::new();
        obj.insert("family".into(), Value::from(self.family()));
        obj.insert("params".into(), Value::Object(params));
        Value::Object(obj)
    }
}

impl fmt::Display for DistSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vals: Vec<String> = self.params().iter().map(|(_, v)| format!("{v}")).collect();
        write!(f, "{}({})", self.family(), vals.join(","))
    }
}

impl std::str::FromStr for DistSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DistSpec::parse(s)
    }
}

impl Serialize for DistSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for DistSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        match &v {
            Value::String(s) => DistSpec::parse(s),
            _ => DistSpec::from_json(&v),
        }
        .map_err(serde::de::Error::custom)
    }
}
