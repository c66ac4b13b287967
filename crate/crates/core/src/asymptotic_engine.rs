//! Closed-form tail calculus for two independent operands.
//!
//! * [`sum_mixed_tail`]: Weibull-type plus bounded edge.
//! * [`sum_dominant_tail`]: the heavier summand wins under (A) or (B).
//! * [`product_mixed_tail`]: Weibull-type times positive bounded edge.
//! * [`product_power_tail`]: power tail times a light enough factor.
//!
//! [`sum_tail`] and [`product_tail`] pick among these from the declared
//! tail families of two models.
//!
//! The domination conditions are decided on the tail families, never on
//! sampled values.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::ln_gamma;
use crate::tail_model::{
    moment, AsymptoticTail, DeclaredTail, DistributionModel, EdgeTail, PowerTail, WeibullTail,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConditionKind {
    A,
    B,
    #[serde(rename = "C_alpha")]
    CAlpha,
    #[serde(rename = "D_alpha")]
    DAlpha,
}

impl std::fmt::Display for ConditionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ConditionKind::A => "(A)",
            ConditionKind::B => "(B)",
            ConditionKind::CAlpha => "(C_alpha)",
            ConditionKind::DAlpha => "(D_alpha)",
        })
    }
}

/// χ(u) = u^exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub family: WitnessFamily,
    pub exponent: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessFamily {
    Power,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionWitness {
    pub kind: ConditionKind,
    pub holds: bool,
    pub chi: Option<Witness>,
}

impl ConditionWitness {
    fn holds(kind: ConditionKind, exponent: Option<f64>) -> Self {
        ConditionWitness {
            kind,
            holds: true,
            chi: exponent.map(|exponent| Witness { family: WitnessFamily::Power, exponent }),
        }
    }

    fn fails(kind: ConditionKind) -> Self {
        ConditionWitness { kind, holds: false, chi: None }
    }
}

/// Second argument of [`check_condition`].
#[derive(Debug, Clone, Copy)]
pub enum Against<'a> {
    Tail(&'a AsymptoticTail),
    Order(f64),
}

/// Decides a domination condition on the tail families.
///
/// (A) and (B) ask for χ with χ(u) → ∞, χ(u)/u → 0 and f(χ(u)) = o(g(u)).
/// For power tails of indices α₁, α₂ the witness u^{(α₁+α₂)/(2α₁)} works
/// exactly when α₁ > α₂; a Weibull-type f beats any power g with u^{1/2}.
///
/// (C_α) is (A) against g(u) = u^{−α}. Its definition writes χ(u) → 0,
/// yet the argument that consumes it needs χ(u) → ∞; witnesses here
/// follow the second reading. Under the first reading the condition
/// would be vacuous for every tail with SF(0) < ∞, so nothing computed
/// downstream could distinguish the two.
///
/// (D_α) holds for a power tail of index β iff β > α and for every
/// Weibull-type tail; it carries no witness.
pub fn check_condition(kind: ConditionKind, f: &AsymptoticTail, g: Against<'_>) -> Result<ConditionWitness> {
    f.validate()?;
    match (kind, g) {
        (ConditionKind::A | ConditionKind::B, Against::Tail(g)) => {
            g.validate()?;
            match (f, g) {
                (AsymptoticTail::PowerTail(f), AsymptoticTail::PowerTail(g)) => Ok(if f.alpha > g.alpha {
                    ConditionWitness::holds(kind, Some((f.alpha + g.alpha) / (2.0 * f.alpha)))
                } else {
                    ConditionWitness::fails(kind)
                }),
                (AsymptoticTail::WeibullType(_), AsymptoticTail::PowerTail(_)) => {
                    Ok(ConditionWitness::holds(kind, Some(0.5)))
                }
                (AsymptoticTail::PowerTail(_), AsymptoticTail::WeibullType(_)) => Ok(ConditionWitness::fails(kind)),
                _ => Err(Error::Unsupported(format!(
                    "condition {kind} for f = {}, g = {} is outside the covered family pairs",
                    f.kind_name(),
                    g.kind_name()
                ))),
            }
        }
        (ConditionKind::CAlpha | ConditionKind::DAlpha, Against::Order(alpha)) => {
            if !(alpha.is_finite() && alpha > 0.0) {
                return Err(Error::spec(format!("condition order must be positive, got {alpha}")));
            }
            match f {
                AsymptoticTail::PowerTail(p) => Ok(if p.alpha > alpha {
                    let chi = (kind == ConditionKind::CAlpha).then(|| (p.alpha + alpha) / (2.0 * p.alpha));
                    ConditionWitness::holds(kind, chi)
                } else {
                    ConditionWitness::fails(kind)
                }),
                AsymptoticTail::WeibullType(_) => {
                    Ok(ConditionWitness::holds(kind, (kind == ConditionKind::CAlpha).then_some(0.5)))
                }
                AsymptoticTail::EdgePower(_) => Err(Error::Unsupported(format!(
                    "condition {kind} is not classified for an EdgePower tail"
                ))),
            }
        }
        _ => Err(Error::spec(format!(
            "condition {kind} takes {}",
            if matches!(kind, ConditionKind::A | ConditionKind::B) { "two tails" } else { "a tail and an order" }
        ))),
    }
}

/// Tail of X + Y for a Weibull-type X (order > 1) and an edge-bounded Y.
pub fn sum_mixed_tail(x: &WeibullTail, y: &EdgeTail) -> Result<WeibullTail> {
    x.validate()?;
    y.validate()?;
    if !(x.alpha > 1.0) {
        return Err(Error::assumption("α > 1", format!("Weibull order alpha = {}", x.alpha)));
    }
    if x.shift != 0.0 {
        return Err(Error::assumption("x.shift = 0", format!("shift = {}", x.shift)));
    }
    let ln_c = x.c.ln() + y.c.ln() - y.mu * (x.k * x.alpha).ln() + ln_gamma(y.mu + 1.0);
    WeibullTail::new(ln_c.exp(), y.mu + x.rho - x.alpha * y.mu, x.k, x.alpha, y.sigma)
}

/// Tail of X + Y when X is negligible against Y.
///
/// With `x_nonnegative` the pair (x, y) must satisfy (A). Otherwise pass
/// in `x` the heavier of X's two tails and (B) is checked.
pub fn sum_dominant_tail(x: &AsymptoticTail, y: &AsymptoticTail, x_nonnegative: bool) -> Result<AsymptoticTail> {
    let kind = if x_nonnegative { ConditionKind::A } else { ConditionKind::B };
    let w = check_condition(kind, x, Against::Tail(y)).map_err(|e| match e {
        Error::Unsupported(msg) => Error::Condition { kind: kind.to_string(), detail: msg },
        other => other,
    })?;
    if !w.holds {
        return Err(Error::Condition {
            kind: kind.to_string(),
            detail: format!("{} is not o({}) along any admissible witness", x.kind_name(), y.kind_name()),
        });
    }
    Ok(*y)
}

/// Tail of X·Y for a Weibull-type X and an edge-bounded Y with σ > 0.
pub fn product_mixed_tail(x: &WeibullTail, y: &EdgeTail) -> Result<WeibullTail> {
    x.validate()?;
    y.validate()?;
    if !(y.sigma > 0.0) {
        return Err(Error::assumption("σ > 0", format!("edge endpoint sigma = {}", y.sigma)));
    }
    if x.shift != 0.0 {
        return Err(Error::assumption("x.shift = 0", format!("shift = {}", x.shift)));
    }
    let ln_c = x.c.ln() + y.c.ln() + ln_gamma(y.mu + 1.0) + (x.alpha * y.mu + y.mu - x.rho) * y.sigma.ln()
        - y.mu * (x.k * x.alpha).ln();
    WeibullTail::new(ln_c.exp(), x.rho - x.alpha * y.mu, x.k * y.sigma.powf(-x.alpha), x.alpha, 0.0)
}

/// Tail of X·Y for a positive X light enough against the power tail of Y.
pub fn product_power_tail(x_model: &DistributionModel, y: &PowerTail) -> Result<PowerTail> {
    y.validate()?;
    let sup = x_model.support();
    if sup.lo < 0.0 || x_model.atom() == Some(0.0) {
        return Err(Error::assumption(
            "X supported on (0, inf)",
            format!("{} has support [{}, {}]", x_model.label(), sup.lo, sup.hi),
        ));
    }
    match x_model.tail() {
        DeclaredTail::Family { tail } => {
            for kind in [ConditionKind::CAlpha, ConditionKind::DAlpha] {
                let w = check_condition(kind, tail, Against::Order(y.alpha)).map_err(|e| match e {
                    Error::Unsupported(msg) => Error::Condition { kind: kind.to_string(), detail: msg },
                    other => other,
                })?;
                if !w.holds {
                    return Err(Error::Condition {
                        kind: kind.to_string(),
                        detail: format!("{} fails it at order {}", x_model.label(), y.alpha),
                    });
                }
            }
        }
        DeclaredTail::Bounded { .. } | DeclaredTail::LighterThanPower => {}
    }
    PowerTail::new(y.c * moment(x_model, y.alpha)?, y.alpha)
}

/// Density shapes that convert to survival-function tails.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum DensityCase {
    /// f(u) ~ C·α·u^(−α−1)
    Power {
        #[serde(rename = "C")]
        c: f64,
        alpha: f64,
    },
    /// f(u) ~ C·u^β·exp(−K·u^α)
    WeibullType {
        #[serde(rename = "C")]
        c: f64,
        beta: f64,
        #[serde(rename = "K")]
        k: f64,
        alpha: f64,
    },
    /// f(u) ~ C·α·(M − u)^(α−1)
    Edge {
        #[serde(rename = "C")]
        c: f64,
        #[serde(rename = "M")]
        m: f64,
        alpha: f64,
    },
}

pub fn density_to_sf(case: DensityCase) -> Result<AsymptoticTail> {
    let spec_err = |e: Error| match e {
        Error::Spec(msg) => Error::Spec(format!("density parameters: {msg}")),
        other => other,
    };
    Ok(match case {
        DensityCase::Power { c, alpha } => PowerTail::new(c, alpha).map_err(spec_err)?.into(),
        DensityCase::WeibullType { c, beta, k, alpha } => {
            if !(c > 0.0 && k > 0.0 && alpha > 0.0 && beta.is_finite()) {
                return Err(Error::spec(format!("density parameters: need C, K, alpha > 0 (C={c}, K={k}, alpha={alpha})")));
            }
            WeibullTail::new(c / (alpha * k), beta + 1.0 - alpha, k, alpha, 0.0)?.into()
        }
        DensityCase::Edge { c, m, alpha } => EdgeTail::new(c, m, alpha).map_err(spec_err)?.into(),
    })
}

/// Which closed form produced a dispatched tail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    SumMixed,
    SumDominant,
    ProductMixed,
    ProductPower,
}

fn power_of(m: &DistributionModel) -> Option<PowerTail> {
    match m.asymptotic_tail() {
        Some(AsymptoticTail::PowerTail(p)) => Some(*p),
        _ => None,
    }
}

fn weibull_edge<'a>(
    a: &'a DistributionModel,
    b: &'a DistributionModel,
) -> Option<(WeibullTail, EdgeTail)> {
    for (p, q) in [(a, b), (b, a)] {
        if let (Some(AsymptoticTail::WeibullType(w)), Some(AsymptoticTail::EdgePower(e))) =
            (p.asymptotic_tail(), q.asymptotic_tail())
        {
            return Some((*w, *e));
        }
    }
    None
}

fn unsupported(op: &str, a: &DistributionModel, b: &DistributionModel) -> Error {
    Error::Unsupported(format!("no closed form for the {op} of {} and {}", a.label(), b.label()))
}

/// Tail of X + Y, choosing the rule from the declared tail families.
pub fn sum_tail(x: &DistributionModel, y: &DistributionModel) -> Result<(AsymptoticTail, Rule)> {
    if let Some((w, e)) = weibull_edge(x, y) {
        return Ok((sum_mixed_tail(&w, &e)?.into(), Rule::SumMixed));
    }
    let (light, p) = match (power_of(x), power_of(y)) {
        (Some(px), Some(py)) if px.alpha < py.alpha => (y, px),
        (Some(px), Some(py)) if px.alpha == py.alpha => return Err(unsupported("sum", x, y)),
        (_, Some(py)) => (x, py),
        (Some(px), None) => (y, px),
        (None, None) => return Err(unsupported("sum", x, y)),
    };
    match light.tail() {
        // Bounded or lighter than every power: negligible against p.
        DeclaredTail::Bounded { .. } | DeclaredTail::LighterThanPower => Ok((p.into(), Rule::SumDominant)),
        DeclaredTail::Family { tail } => {
            let nonneg = light.support().lo >= 0.0;
            Ok((sum_dominant_tail(tail, &p.into(), nonneg)?, Rule::SumDominant))
        }
    }
}

/// Tail of X·Y, choosing the rule from the declared tail families.
pub fn product_tail(x: &DistributionModel, y: &DistributionModel) -> Result<(AsymptoticTail, Rule)> {
    if let Some((w, e)) = weibull_edge(x, y) {
        return Ok((product_mixed_tail(&w, &e)?.into(), Rule::ProductMixed));
    }
    let (light, p) = match (power_of(x), power_of(y)) {
        (Some(px), Some(py)) if px.alpha < py.alpha => (y, px),
        (_, Some(py)) => (x, py),
        (Some(px), None) => (y, px),
        (None, None) => return Err(unsupported("product", x, y)),
    };
    Ok((product_power_tail(light, &p)?.into(), Rule::ProductPower))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tail_model::make_model;
    use approx::assert_relative_eq;

    fn wt(c: f64, rho: f64, k: f64, alpha: f64, shift: f64) -> WeibullTail {
        WeibullTail::new(c, rho, k, alpha, shift).unwrap()
    }

    fn edge(c: f64, sigma: f64, mu: f64) -> EdgeTail {
        EdgeTail::new(c, sigma, mu).unwrap()
    }

    fn power(c: f64, alpha: f64) -> AsymptoticTail {
        PowerTail::new(c, alpha).unwrap().into()
    }

    fn close(a: WeibullTail, b: WeibullTail) {
        let d = AsymptoticTail::from(a).field_distance(&b.into()).unwrap();
        assert!(d < 1e-14, "{a:?} vs {b:?}");
    }

    #[test]
    fn sum_mixed_examples() {
        let x = wt(1.0, 0.0, 1.0, 2.0, 0.0);
        close(sum_mixed_tail(&x, &edge(1.0, 0.0, 1.0)).unwrap(), wt(0.5, -1.0, 1.0, 2.0, 0.0));
        close(sum_mixed_tail(&x, &edge(1.0, 1.0, 1.0)).unwrap(), wt(0.5, -1.0, 1.0, 2.0, 1.0));
        let x = wt(1.0, 1.0, 0.5, 2.0, 0.0);
        close(sum_mixed_tail(&x, &edge(1.0, 0.0, 2.0)).unwrap(), wt(2.0, -1.0, 0.5, 2.0, 0.0));
    }

    #[test]
    fn sum_mixed_requires_order_above_one() {
        let err = sum_mixed_tail(&wt(1.0, 0.0, 1.0, 1.0, 0.0), &edge(1.0, 0.0, 1.0)).unwrap_err();
        match err {
            Error::Assumption { hypothesis, .. } => assert_eq!(hypothesis, "α > 1"),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn shift_reduction_field_by_field() {
        let x = wt(1.3, 0.4, 0.7, 2.5, 0.0);
        for s in [-3.0, 0.5, 7.25] {
            let shifted = sum_mixed_tail(&x, &edge(2.0, s, 1.5)).unwrap();
            let mut base = sum_mixed_tail(&x, &edge(2.0, 0.0, 1.5)).unwrap();
            base.shift = s;
            assert_eq!(shifted, base);
        }
    }

    #[test]
    fn dominant_sum_examples() {
        let y = power(1.0, 1.0);
        assert_eq!(sum_dominant_tail(&power(1.0, 3.0), &y, true).unwrap(), y);
        let y = power(1.0, 2.0);
        assert_eq!(sum_dominant_tail(&wt(1.0, 0.0, 1.0, 2.0, 0.0).into(), &y, true).unwrap(), y);
        assert!(matches!(
            sum_dominant_tail(&power(1.0, 1.0), &power(1.0, 1.0), true),
            Err(Error::Condition { .. })
        ));
        assert!(matches!(
            sum_dominant_tail(&edge(1.0, 0.0, 1.0).into(), &y, false),
            Err(Error::Condition { .. })
        ));
    }

    #[test]
    fn product_mixed_examples() {
        let x = wt(1.0, 0.0, 1.0, 2.0, 0.0);
        close(product_mixed_tail(&x, &edge(1.0, 2.0, 1.0)).unwrap(), wt(4.0, -2.0, 0.25, 2.0, 0.0));
        close(product_mixed_tail(&x, &edge(1.0, 1.0, 1.0)).unwrap(), wt(0.5, -2.0, 1.0, 2.0, 0.0));
        let low = wt(1.0, 0.0, 1.0, 0.5, 0.0);
        assert!(product_mixed_tail(&low, &edge(1.0, 2.0, 1.0)).is_ok());
        assert!(matches!(product_mixed_tail(&x, &edge(1.0, 0.0, 1.0)), Err(Error::Assumption { .. })));
    }

    #[test]
    fn product_power_examples() {
        let t = product_power_tail(&make_model("lognormal(0,1)").unwrap(), &PowerTail::new(1.0, 2.0).unwrap()).unwrap();
        assert_relative_eq!(t.c, 2f64.exp(), max_relative = 1e-14);
        assert_eq!(t.alpha, 2.0);
        let y = PowerTail::new(3.0, 1.5).unwrap();
        assert_eq!(product_power_tail(&make_model("constant(1)").unwrap(), &y).unwrap(), y);
        let r = product_power_tail(&make_model("pareto(1,2)").unwrap(), &PowerTail::new(1.0, 2.0).unwrap());
        assert!(matches!(r, Err(Error::Condition { .. })));
        let r = product_power_tail(&make_model("normal").unwrap(), &PowerTail::new(1.0, 2.0).unwrap());
        assert!(matches!(r, Err(Error::Assumption { .. })));
    }

    #[test]
    fn condition_examples() {
        let w = check_condition(ConditionKind::A, &power(1.0, 3.0), Against::Tail(&power(1.0, 1.0))).unwrap();
        assert!(w.holds);
        assert_relative_eq!(w.chi.unwrap().exponent, 2.0 / 3.0);
        let w = check_condition(ConditionKind::B, &power(1.0, 1.0), Against::Tail(&power(1.0, 2.0))).unwrap();
        assert!(!w.holds && w.chi.is_none());
        let f = wt(1.0, 5.0, 1.0, 0.5, 0.0).into();
        assert!(check_condition(ConditionKind::DAlpha, &f, Against::Order(10.0)).unwrap().holds);
        assert!(check_condition(ConditionKind::CAlpha, &f, Against::Order(10.0)).unwrap().holds);
        assert!(matches!(
            check_condition(ConditionKind::A, &edge(1.0, 0.0, 1.0).into(), Against::Tail(&power(1.0, 1.0))),
            Err(Error::Unsupported(_))
        ));
        assert!(matches!(
            check_condition(ConditionKind::A, &power(1.0, 1.0), Against::Order(1.0)),
            Err(Error::Spec(_))
        ));
        let d = check_condition(ConditionKind::DAlpha, &power(1.0, 2.0), Against::Order(2.0)).unwrap();
        assert!(!d.holds);
    }

    #[test]
    fn witness_exponents_lie_in_unit_interval() {
        for a1 in [0.5, 1.0, 2.0, 7.0] {
            for a2 in [0.1, 0.4, 1.5, 6.9] {
                let w = check_condition(ConditionKind::A, &power(1.0, a1), Against::Tail(&power(2.0, a2))).unwrap();
                if let Some(chi) = w.chi {
                    assert!(chi.exponent > 0.0 && chi.exponent < 1.0);
                }
            }
        }
    }

    /// Whenever (A) holds, ln f − ln g drifts to −∞ along the grid.
    #[test]
    fn condition_a_implies_little_o() {
        let gs = [power(1.0, 0.5), power(3.0, 2.0)];
        let fs = [power(1.0, 3.0), power(0.1, 1.0), wt(5.0, 2.0, 0.1, 0.5, 0.0).into()];
        for f in &fs {
            for g in &gs {
                let w = check_condition(ConditionKind::A, f, Against::Tail(g)).unwrap();
                if !w.holds {
                    continue;
                }
                let diffs: Vec<f64> =
                    [1e4, 1e8, 1e16, 1e32].iter().map(|&u| f.log_eval(u).unwrap() - g.log_eval(u).unwrap()).collect();
                assert!(diffs.windows(2).all(|d| d[1] < d[0]), "{f:?} {g:?} {diffs:?}");
                assert!(*diffs.last().unwrap() < -10.0);
            }
        }
    }

    #[test]
    fn density_conversion_examples() {
        assert_eq!(density_to_sf(DensityCase::Power { c: 2.0, alpha: 3.0 }).unwrap(), power(2.0, 3.0));
        assert_eq!(
            density_to_sf(DensityCase::WeibullType { c: 1.0, beta: 0.0, k: 0.5, alpha: 2.0 }).unwrap(),
            wt(1.0, -1.0, 0.5, 2.0, 0.0).into()
        );
        assert_eq!(
            density_to_sf(DensityCase::Edge { c: 1.0, m: 0.0, alpha: 1.0 }).unwrap(),
            edge(1.0, 0.0, 1.0).into()
        );
        assert!(matches!(density_to_sf(DensityCase::Power { c: -1.0, alpha: 3.0 }), Err(Error::Spec(_))));
        assert!(matches!(
            density_to_sf(DensityCase::WeibullType { c: 1.0, beta: 0.0, k: 0.0, alpha: 2.0 }),
            Err(Error::Spec(_))
        ));
    }

    /// Gaussian density e^{−u²/2} against erfc, and the integral check for a
    /// few Weibull-type densities.
    #[test]
    fn density_conversion_integrates_back() {
        use crate::quadrature::{integrate_log, QuadOptions};
        let t = density_to_sf(DensityCase::WeibullType { c: 1.0, beta: 0.0, k: 0.5, alpha: 2.0 }).unwrap();
        let ratio = (2.0 * std::f64::consts::PI).sqrt() * crate::special::std_normal_sf(6.0) / t.log_eval(6.0).unwrap().exp();
        assert!((ratio - 1.0).abs() < 0.03, "{ratio}");
        for (c, beta, k, alpha, u) in [(1.0, 0.0, 0.5, 2.0, 12.0), (2.0, 1.5, 1.0, 1.5, 40.0), (0.3, -2.0, 2.0, 3.0, 5.0)] {
            let t = density_to_sf(DensityCase::WeibullType { c, beta, k, alpha }).unwrap();
            let lf = |x: f64| c.ln() + beta * x.ln() - k * x.powf(alpha);
            let num = integrate_log(lf, u, f64::INFINITY, &QuadOptions::default()).unwrap().log_value;
            let r = (num - t.log_eval(u).unwrap()).exp();
            assert!((0.98..=1.02).contains(&r), "{r}");
        }
    }

    #[test]
    fn dispatch_by_family() {
        let m = |s: &str| crate::tail_model::make_model(s).unwrap();
        let (t, r) = sum_tail(&m("weibull(1,2)"), &m("edge(0,1)")).unwrap();
        assert_eq!(r, Rule::SumMixed);
        assert_eq!(t, WeibullTail { c: 0.5, rho: -1.0, k: 1.0, alpha: 2.0, shift: 0.0 }.into());
        assert_eq!(sum_tail(&m("edge(0,1)"), &m("weibull(1,2)")).unwrap().0, t);
        let e = sum_tail(&m("weibull(1,1)"), &m("edge(0,1)")).unwrap_err();
        assert!(e.to_string().contains("α > 1"), "{e}");
        let (t, r) = sum_tail(&m("weibull(1,2)"), &m("pareto(1,2)")).unwrap();
        assert_eq!((t, r), (PowerTail { c: 1.0, alpha: 2.0 }.into(), Rule::SumDominant));
        assert_eq!(sum_tail(&m("pareto(2,3)"), &m("pareto(1,2)")).unwrap().0, PowerTail { c: 1.0, alpha: 2.0 }.into());
        assert_eq!(sum_tail(&m("lognormal(0,1)"), &m("pareto(1,2)")).unwrap().0, PowerTail { c: 1.0, alpha: 2.0 }.into());
        assert!(matches!(sum_tail(&m("normal"), &m("lognormal(0,1)")), Err(Error::Unsupported(_))));

        let (t, r) = product_tail(&m("weibull(1,2)"), &m("edge(2,1)")).unwrap();
        assert_eq!(r, Rule::ProductMixed);
        assert!(matches!(t, AsymptoticTail::WeibullType(_)));
        let (t, r) = product_tail(&m("lognormal(0,1)"), &m("pareto(1,2)")).unwrap();
        assert_eq!(r, Rule::ProductPower);
        let AsymptoticTail::PowerTail(p) = t else { panic!() };
        assert!((p.c - 2f64.exp()).abs() < 1e-9 * p.c);
        assert!(matches!(product_tail(&m("weibull(1,2)"), &m("edge(0,1)")), Err(Error::Assumption { .. })));
    }
}
