use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore};
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::spec::DistSpec;
use super::{AsymptoticTail, EdgeTail, PowerTail, WeibullTail};
use crate::error::{Error, Result};
use crate::special::{gamma, ln_std_normal_pdf, ln_std_normal_sf};

type LogFn = dyn Fn(f64) -> f64 + Send + Sync;
type SampleFn = dyn Fn(&mut dyn RngCore) -> f64 + Send + Sync;
type MomentFn = dyn Fn(f64) -> f64 + Send + Sync;

/// Closed support interval; infinite ends are open.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Support {
    pub lo: f64,
    pub hi: f64,
}

impl Support {
    pub const REAL_LINE: Support = Support { lo: f64::NEG_INFINITY, hi: f64::INFINITY };

    pub fn new(lo: f64, hi: f64) -> Self {
        Support { lo, hi }
    }
}

/// What is known about the right tail of a model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum DeclaredTail {
    /// One of the closed tail families, with exact constants.
    Family { tail: AsymptoticTail },
    /// Finite essential supremum with no tail form attached.
    Bounded { sup: f64 },
    /// Lighter than every power, heavier than every Weibull-type tail
    /// (the lognormal law).
    LighterThanPower,
}

/// An exact law. Cheap to clone; immutable after construction.
#[derive(Clone)]
pub struct DistributionModel {
    label: String,
    spec: Option<DistSpec>,
    support: Support,
    tail: DeclaredTail,
    log_sf: Arc<LogFn>,
    log_density: Option<Arc<LogFn>>,
    atom: Option<f64>,
    sampler: Arc<SampleFn>,
    closed_moment: Option<Arc<MomentFn>>,
}

impl fmt::Debug for DistributionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DistributionModel")
            .field("label", &self.label)
            .field("support", &self.support)
            .field("tail", &self.tail)
            .finish_non_exhaustive()
    }
}

/// Uniform on (0, 1], safe for logs and negative powers.
#[inline]
fn open_uniform(rng: &mut dyn RngCore) -> f64 {
    1.0 - rng.random::<f64>()
}

impl DistributionModel {
    /// A user-supplied law. `log_sf` must be nonincreasing with value 0
    /// below the support and −∞ above it.
    pub fn custom(
        label: impl Into<String>,
        support: Support,
        tail: DeclaredTail,
        log_sf: impl Fn(f64) -> f64 + Send + Sync + 'static,
        sampler: impl Fn(&mut dyn RngCore) -> f64 + Send + Sync + 'static,
    ) -> Self {
        DistributionModel {
            label: label.into(),
            spec: None,
            support,
            tail,
            log_sf: Arc::new(log_sf),
            log_density: None,
            atom: None,
            sampler: Arc::new(sampler),
            closed_moment: None,
        }
    }

    pub fn with_log_density(mut self, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.log_density = Some(Arc::new(f));
        self
    }

    /// Marks the law as a point mass at `c`.
    pub fn with_atom(mut self, c: f64) -> Self {
        self.atom = Some(c);
        self
    }

    pub fn with_moment(mut self, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.closed_moment = Some(Arc::new(f));
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn spec(&self) -> Option<&DistSpec> {
        self.spec.as_ref()
    }

    pub fn support(&self) -> Support {
        self.support
    }

    pub fn tail(&self) -> &DeclaredTail {
        &self.tail
    }

    pub fn asymptotic_tail(&self) -> Option<&AsymptoticTail> {
        match &self.tail {
            DeclaredTail::Family { tail } => Some(tail),
            _ => None,
        }
    }

    pub fn log_sf(&self, u: f64) -> f64 {
        (self.log_sf)(u)
    }

    pub fn sf(&self, u: f64) -> f64 {
        (self.log_sf)(u).exp()
    }

    pub fn log_density(&self, x: f64) -> Option<f64> {
        self.log_density.as_ref().map(|f| f(x))
    }

    pub fn has_density(&self) -> bool {
        self.log_density.is_some()
    }

    pub fn atom(&self) -> Option<f64> {
        self.atom
    }

    pub fn sample<R: RngCore>(&self, rng: &mut R) -> f64 {
        (self.sampler)(rng)
    }

    pub fn sample_dyn(&self, rng: &mut dyn RngCore) -> f64 {
        (self.sampler)(rng)
    }

    pub(crate) fn closed_moment(&self, alpha: f64) -> Option<f64> {
        self.closed_moment.as_ref().map(|f| f(alpha))
    }

    /// Law whose survival function equals the tail form exactly wherever
    /// the form is at most 1 and decreasing; any leftover mass sits at the
    /// left endpoint.
    pub fn tail_exact(tail: &AsymptoticTail) -> Result<Self> {
        tail.validate()?;
        match *tail {
            AsymptoticTail::PowerTail(PowerTail { c, alpha }) => {
                let mut m = from_spec(DistSpec::Pareto { c, alpha })?;
                m.label = format!("tail_exact(PowerTail{{C={c},alpha={alpha}}})");
                m.spec = None;
                Ok(m)
            }
            AsymptoticTail::EdgePower(t) => Ok(edge_with_coefficient(t)),
            AsymptoticTail::WeibullType(t) => weibull_type_exact(t),
        }
    }
}

/// Builds the registry law named by `spec`.
pub fn make_model(spec: &str) -> Result<DistributionModel> {
    from_spec(DistSpec::parse(spec)?)
}

impl DistSpec {
    pub fn model(&self) -> Result<DistributionModel> {
        from_spec(*self)
    }
}

fn base(spec: DistSpec, support: Support, tail: DeclaredTail) -> impl FnOnce(Arc<LogFn>, Arc<SampleFn>) -> DistributionModel {
    move |log_sf, sampler| DistributionModel {
        label: spec.to_string(),
        spec: Some(spec),
        support,
        tail,
        log_sf,
        log_density: None,
        atom: None,
        sampler,
        closed_moment: None,
    }
}

fn from_spec(spec: DistSpec) -> Result<DistributionModel> {
    spec.validate()?;
    let model = match spec {
        DistSpec::Weibull { k, alpha } => {
            let tail = WeibullTail::new(1.0, 0.0, k, alpha, 0.0)?;
            base(spec, Support::new(0.0, f64::INFINITY), DeclaredTail::Family { tail: tail.into() })(
                Arc::new(move |u: f64| if u <= 0.0 { 0.0 } else { -k * u.powf(alpha) }),
                Arc::new(move |rng: &mut dyn RngCore| (-open_uniform(rng).ln() / k).powf(1.0 / alpha)),
            )
            .with_log_density(move |x: f64| {
                if x <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    (k * alpha).ln() + (alpha - 1.0) * x.ln() - k * x.powf(alpha)
                }
            })
            .with_moment(move |a| k.powf(-a / alpha) * gamma(a / alpha + 1.0))
        }
        DistSpec::Pareto { c, alpha } => {
            let xmin = c.powf(1.0 / alpha);
            let tail = PowerTail::new(c, alpha)?;
            base(spec, Support::new(xmin, f64::INFINITY), DeclaredTail::Family { tail: tail.into() })(
                Arc::new(move |u: f64| if u <= xmin { 0.0 } else { c.ln() - alpha * u.ln() }),
                Arc::new(move |rng: &mut dyn RngCore| xmin * open_uniform(rng).powf(-1.0 / alpha)),
            )
            .with_log_density(move |x: f64| {
                if x < xmin {
                    f64::NEG_INFINITY
                } else {
                    (c * alpha).ln() - (alpha + 1.0) * x.ln()
                }
            })
            .with_moment(move |a| if a < alpha { alpha * xmin.powf(a) / (alpha - a) } else { f64::INFINITY })
        }
        DistSpec::Edge { sigma, mu } => edge_with_coefficient(EdgeTail::new(1.0, sigma, mu)?).relabel(spec),
        DistSpec::Lognormal { m, s } => base(spec, Support::new(0.0, f64::INFINITY), DeclaredTail::LighterThanPower)(
            Arc::new(move |u: f64| if u <= 0.0 { 0.0 } else { ln_std_normal_sf((u.ln() - m) / s) }),
            Arc::new(move |rng: &mut dyn RngCore| {
                let z: f64 = rng.sample(StandardNormal);
                (m + s * z).exp()
            }),
        )
        .with_log_density(move |x: f64| {
            if x <= 0.0 {
                f64::NEG_INFINITY
            } else {
                -(x * s).ln() + ln_std_normal_pdf((x.ln() - m) / s)
            }
        })
        .with_moment(move |a| (a * m + 0.5 * a * a * s * s).exp()),
        DistSpec::Normal => {
            let tail = WeibullTail::new((2.0 * PI).sqrt().recip(), -1.0, 0.5, 2.0, 0.0)?;
            base(spec, Support::REAL_LINE, DeclaredTail::Family { tail: tail.into() })(
                Arc::new(ln_std_normal_sf),
                Arc::new(|rng: &mut dyn RngCore| rng.sample::<f64, _>(StandardNormal)),
            )
            .with_log_density(ln_std_normal_pdf)
        }
        DistSpec::Constant { c } => base(spec, Support::new(c, c), DeclaredTail::Bounded { sup: c })(
            Arc::new(move |u: f64| if u < c { 0.0 } else { f64::NEG_INFINITY }),
            Arc::new(move |_: &mut dyn RngCore| c),
        )
        .with_atom(c)
        .with_moment(move |a| c.powf(a)),
        DistSpec::LowerPower { delta, c, mu } => {
            let top = delta + c.powf(-1.0 / mu);
            let tail = EdgeTail::new(mu * c.powf(1.0 / mu), top, 1.0)?;
            base(spec, Support::new(delta, top), DeclaredTail::Family { tail: tail.into() })(
                Arc::new(move |u: f64| {
                    if u <= delta {
                        0.0
                    } else if u >= top {
                        f64::NEG_INFINITY
                    } else {
                        (-c * (u - delta).powf(mu)).ln_1p()
                    }
                }),
                Arc::new(move |rng: &mut dyn RngCore| delta + (rng.random::<f64>() / c).powf(1.0 / mu)),
            )
            .with_log_density(move |x: f64| {
                if x <= delta || x > top {
                    f64::NEG_INFINITY
                } else {
                    (c * mu).ln() + (mu - 1.0) * (x - delta).ln()
                }
            })
        }
        DistSpec::NegPareto { c, alpha } => {
            let xmin = c.powf(1.0 / alpha);
            base(spec, Support::new(f64::NEG_INFINITY, -xmin), DeclaredTail::Bounded { sup: -xmin })(
                Arc::new(move |u: f64| {
                    if u >= -xmin {
                        f64::NEG_INFINITY
                    } else {
                        (-c * (-u).powf(-alpha)).ln_1p()
                    }
                }),
                Arc::new(move |rng: &mut dyn RngCore| -xmin * open_uniform(rng).powf(-1.0 / alpha)),
            )
            .with_log_density(move |x: f64| {
                if x > -xmin {
                    f64::NEG_INFINITY
                } else {
                    (c * alpha).ln() - (alpha + 1.0) * (-x).ln()
                }
            })
        }
    };
    Ok(model)
}

impl DistributionModel {
    fn relabel(mut self, spec: DistSpec) -> Self {
        self.label = spec.to_string();
        self.spec = Some(spec);
        self
    }
}

/// SF(u) = min(1, C·(sigma − u)^mu) below sigma.
fn edge_with_coefficient(t: EdgeTail) -> DistributionModel {
    let EdgeTail { c, sigma, mu } = t;
    let lo = sigma - c.powf(-1.0 / mu);
    DistributionModel {
        label: format!("tail_exact(EdgePower{{C={c},sigma={sigma},mu={mu}}})"),
        spec: None,
        support: Support::new(lo, sigma),
        tail: DeclaredTail::Family { tail: t.into() },
        log_sf: Arc::new(move |u: f64| {
            if u <= lo {
                0.0
            } else if u >= sigma {
                f64::NEG_INFINITY
            } else {
                c.ln() + mu * (sigma - u).ln()
            }
        }),
        log_density: Some(Arc::new(move |x: f64| {
            if x < lo || x >= sigma {
                f64::NEG_INFINITY
            } else {
                (c * mu).ln() + (mu - 1.0) * (sigma - x).ln()
            }
        })),
        atom: None,
        sampler: Arc::new(move |rng: &mut dyn RngCore| sigma - (rng.random::<f64>() / c).powf(1.0 / mu)),
        closed_moment: None,
    }
}

fn weibull_type_exact(t: WeibullTail) -> Result<DistributionModel> {
    let WeibullTail { c, rho, k, alpha, shift } = t;
    let log_h = move |u: f64| c.ln() + if rho == 0.0 { 0.0 } else { rho * u.ln() } - k * (u - shift).powf(alpha);
    let slope = move |u: f64| rho / u - k * alpha * (u - shift).powf(alpha - 1.0);
    let lower = if rho == 0.0 { shift } else { shift.max(0.0) };
    let scale = 1.0 + lower.abs();

    // First point past which ln h decreases; immediate when rho ≤ 0.
    let mut start = lower;
    if rho > 0.0 {
        let mut hi = lower + scale;
        while slope(hi) >= 0.0 {
            hi = lower + 2.0 * (hi - lower);
            if !hi.is_finite() {
                return Err(Error::Unsupported("tail form never decreases".into()));
            }
        }
        let mut lo = lower;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if slope(mid) >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        start = hi;
    }
    // Smallest point past `start` where h ≤ 1.
    let u0 = if log_h(start) <= 0.0 {
        start
    } else {
        let mut lo = start;
        let mut hi = start + scale;
        while log_h(hi) > 0.0 {
            hi = start + 2.0 * (hi - start);
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if log_h(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    };
    let lh0 = log_h(u0);
    let sampler = move |rng: &mut dyn RngCore| {
        let lu = open_uniform(rng).ln();
        if lu >= lh0 {
            return u0;
        }
        let mut lo = u0;
        let mut hi = u0 + scale;
        while log_h(hi) > lu {
            hi = u0 + 2.0 * (hi - u0);
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if log_h(mid) > lu {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    Ok(DistributionModel {
        label: format!("tail_exact(WeibullType{{C={c},rho={rho},K={k},alpha={alpha},shift={shift}}})"),
        spec: None,
        support: Support::new(u0, f64::INFINITY),
        tail: DeclaredTail::Family { tail: t.into() },
        log_sf: Arc::new(move |u: f64| if u < u0 { 0.0 } else { log_h(u) }),
        log_density: None,
        atom: None,
        sampler: Arc::new(sampler),
        closed_moment: None,
    })
}
