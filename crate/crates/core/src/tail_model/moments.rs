use super::model::DistributionModel;
use super::AsymptoticTail;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_log_breaks, QuadOptions};

/// E X^alpha for a law on [0, ∞).
///
/// Closed forms are used where the registry provides them; otherwise
/// E X^α = α ∫₀^∞ SF(u) u^{α−1} du is integrated in the variable ln u.
pub fn moment(model: &DistributionModel, alpha: f64) -> Result<f64> {
    check_moment_args(model, alpha)?;
    if let Some(AsymptoticTail::PowerTail(t)) = model.asymptotic_tail() {
        if t.alpha <= alpha {
            return Err(Error::DivergentMoment {
                order: alpha,
                detail: format!("{} has a power tail of index {} <= {alpha}", model.label(), t.alpha),
            });
        }
    }
    match model.closed_moment(alpha) {
        Some(v) if v.is_finite() => Ok(v),
        _ => moment_by_quadrature(model, alpha),
    }
}

fn check_moment_args(model: &DistributionModel, alpha: f64) -> Result<()> {
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(Error::spec(format!("moment order must be positive and finite, got {alpha}")));
    }
    if model.support().lo < 0.0 {
        return Err(Error::domain(format!("{} is not supported on [0, inf)", model.label())));
    }
    Ok(())
}

/// The integration-by-parts identity, regardless of closed forms.
pub fn moment_by_quadrature(model: &DistributionModel, alpha: f64) -> Result<f64> {
    check_moment_args(model, alpha)?;
    let sup = model.support();
    // SF = 1 on [0, lo]: that part is lo^α exactly.
    let head = if sup.lo > 0.0 { sup.lo.powf(alpha) } else { 0.0 };
    let v_lo = if sup.lo > 0.0 { sup.lo.ln() } else { f64::NEG_INFINITY };
    let v_hi = sup.hi.ln();
    if v_lo >= v_hi {
        return Ok(head);
    }
    let mut breaks = vec![];
    if let Some(a) = model.atom() {
        if a > 0.0 {
            breaks.push(a.ln());
        }
    }
    let log_f = |v: f64| alpha.ln() + alpha * v + model.log_sf(v.exp());
    let q = integrate_log_breaks(log_f, v_lo, v_hi, &breaks, &QuadOptions::with_tol(1e-11))?;
    let tail = q.log_value.exp();
    if !tail.is_finite() {
        return Err(Error::DivergentMoment { order: alpha, detail: format!("{} integral diverges", model.label()) });
    }
    Ok(head + tail)
}
