use std::time::Instant;

use serde::Serialize;
use serde_json::json;
use tailward_core::asymptotic_engine::{product_tail, sum_tail};
use tailward_core::gp_extremes::{
    bm_conditional_mc, bm_exact_oracle_for, bounded_offset_surrogate_oracle, eta_law, sup_exceedance, theorem5_tail,
    theorem6_tail, zeta_law, GaussianProcess, TrendModel,
};
use tailward_core::laplace_kernel::{
    integral_i_asymptotic, integral_i_numeric, laplace_general, watson_asymptotic, watson_numeric, KernelParams,
    LaplaceProblem,
};
use tailward_core::oracle::{ratio_table, Op};
use tailward_core::special::gamma_lr;
use tailward_core::tail_model::Method;
use tailward_core::{make_model, AsymptoticTail, Error, RatioRow, RatioTable, Result};

use crate::report::{rules, NamedEstimates, NamedTable, Rule, VerifyReport};
use crate::{VerifyArgs, VerifyKind};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FixtureInfo {
    pub command: &'static str,
    pub name: &'static str,
    pub about: &'static str,
}

pub const FIXTURES: [FixtureInfo; 14] = [
    FixtureInfo { command: "verify sum", name: "theorem1", about: "weibull(1,2) + edge(0,1), u = 4..10" },
    FixtureInfo { command: "verify sum", name: "theorem2", about: "weibull(1,2) + pareto(1,2), u = 1000" },
    FixtureInfo { command: "verify product", name: "theorem3", about: "weibull(1,2) * edge(2,1), u = 8..20" },
    FixtureInfo { command: "verify product", name: "theorem4", about: "lognormal(0,1) * pareto(1,2), u = 100" },
    FixtureInfo { command: "verify laplace", name: "lemma1", about: "I(u) with alpha=2, beta=0, mu=1, K=1 at u = 15" },
    FixtureInfo { command: "verify laplace", name: "lemma10", about: "product substitution, sigma=2, K=1, alpha=2, beta=-3" },
    FixtureInfo { command: "verify watson", name: "watson", about: "mu = 1.5, u = 10..100, incomplete-gamma oracle" },
    FixtureInfo { command: "gp verify", name: "theorem5-delta0", about: "BM, eta uniform on [0,1]" },
    FixtureInfo { command: "gp verify", name: "theorem5-delta", about: "BM, eta uniform on [0.3,1.3]" },
    FixtureInfo { command: "gp verify", name: "theorem6-1b", about: "BM, delta=0, zeta lower tail u^-0.5" },
    FixtureInfo { command: "gp verify", name: "theorem6-1c", about: "BM, delta=0, zeta lower tail u^-3" },
    FixtureInfo { command: "gp verify", name: "theorem6-2", about: "bounded offset, beta=2 surrogate" },
    FixtureInfo { command: "gp verify", name: "bm-sup", about: "simulated sup(B(t)-t) on [0,50] vs exp(-2u)" },
    FixtureInfo { command: "gp verify", name: "bm-conditional", about: "conditional Monte Carlo vs the exact oracle" },
];

pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::Spec(format!("bad grid '{text}'; expected a:b:step or a comma list"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| bad());
    let grid: Vec<f64> = if text.contains(':') {
        let parts: Vec<&str> = text.split(':').collect();
        let [a, b, step] = parts[..] else { return Err(bad()) };
        let (a, b, step) = (num(a)?, num(b)?, num(step)?);
        if !(step > 0.0) || !(b >= a) || !a.is_finite() || !b.is_finite() {
            return Err(bad());
        }
        let n = ((b - a) / step + 1e-9).floor() as usize;
        (0..=n).map(|i| a + i as f64 * step).collect()
    } else {
        text.split(',').map(num).collect::<Result<_>>()?
    };
    if grid.is_empty() || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Spec(format!("grid '{text}' must be nonempty and strictly increasing")));
    }
    Ok(grid)
}

fn table_from<F>(grid: &[f64], exact: F, log_h: impl Fn(f64) -> Result<f64>) -> RatioTable
where
    F: Fn(f64) -> Result<f64>,
{
    let rows = grid
        .iter()
        .map(|&u| match (exact(u), log_h(u)) {
            (Ok(s), Ok(h)) if s.is_finite() => RatioRow::ok(u, s, h, Method::Quadrature),
            (Ok(s), Ok(h)) => {
                RatioRow::failed(u, Some(s), Some(h), Method::Quadrature, &Error::Domain("exact value underflowed".into()))
            }
            (Err(e), h) => RatioRow::failed(u, None, h.ok(), Method::Quadrature, &e),
            (Ok(s), Err(e)) => RatioRow::failed(u, Some(s), None, Method::Quadrature, &e),
        })
        .collect();
    RatioTable { rows }
}

fn named(name: &str, table: RatioTable) -> NamedTable {
    NamedTable { name: name.into(), table }
}

struct Draft {
    fixture: String,
    theorem: String,
    inputs: serde_json::Value,
    predicted: Option<AsymptoticTail>,
    tables: Vec<NamedTable>,
    estimates: Vec<NamedEstimates>,
    rules: Vec<Rule>,
    notes: Vec<String>,
}

impl Draft {
    fn new(fixture: &str, theorem: &str, inputs: serde_json::Value) -> Self {
        Draft {
            fixture: fixture.into(),
            theorem: theorem.into(),
            inputs,
            predicted: None,
            tables: vec![],
            estimates: vec![],
            rules: vec![],
            notes: vec![],
        }
    }

    fn finish(self, argv: Vec<String>, seed: u64, started: Instant) -> VerifyReport {
        let mut r = VerifyReport {
            fixture: self.fixture,
            theorem: self.theorem,
            argv,
            inputs: self.inputs,
            seed,
            predicted: self.predicted,
            tables: self.tables,
            estimates: self.estimates,
            rules: rules(self.rules),
            pass: false,
            runtime_s: 0.0,
            notes: self.notes,
        };
        r.decide();
        r.runtime_s = started.elapsed().as_secs_f64();
        r
    }
}

fn main_rules(grid: &[f64], ratio_lo: f64, ratio_hi: f64) -> Vec<Rule> {
    let last = *grid.last().expect("nonempty grid");
    vec![
        Rule::AllRowsOk { table: "main".into() },
        Rule::RatioBand { table: "main".into(), u: last, lo: ratio_lo, hi: ratio_hi },
    ]
}

pub fn verify(args: &VerifyArgs, argv: Vec<String>, workers: usize) -> Result<VerifyReport> {
    let started = Instant::now();
    let fixture = args.fixture.as_deref();
    let draft = match args.kind {
        VerifyKind::Sum | VerifyKind::Product => {
            let op = if args.kind == VerifyKind::Sum { Op::Sum } else { Op::Product };
            operand_report(args, fixture, op, workers)?
        }
        VerifyKind::Laplace => laplace_report(args, fixture.unwrap_or("lemma10"))?,
        VerifyKind::Watson => watson_report(args, fixture.unwrap_or("watson"))?,
    };
    Ok(draft.finish(argv, args.seed, started))
}

fn operand_report(args: &VerifyArgs, fixture: Option<&str>, op: Op, workers: usize) -> Result<Draft> {
    let (name, theorem, x, y, grid, rules): (String, &str, String, String, Vec<f64>, Vec<Rule>) = match (fixture, op) {
        (Some("theorem1"), Op::Sum) => (
            "theorem1".into(),
            "weibull plus bounded edge",
            "weibull(1,2)".into(),
            "edge(0,1)".into(),
            vec![4.0, 6.0, 8.0, 10.0],
            vec![
                Rule::AllRowsOk { table: "main".into() },
                Rule::DeviationNonincreasing { table: "main".into(), from_u: 6.0 },
                Rule::DeviationBelow { table: "main".into(), u: 10.0, max: 0.05 },
            ],
        ),
        (Some("theorem2"), Op::Sum) => (
            "theorem2".into(),
            "dominant summand",
            "weibull(1,2)".into(),
            "pareto(1,2)".into(),
            vec![10.0, 100.0, 1000.0],
            main_rules(&[1000.0], 0.95, 1.05),
        ),
        (Some("theorem3"), Op::Product) => (
            "theorem3".into(),
            "weibull times bounded edge",
            "weibull(1,2)".into(),
            "edge(2,1)".into(),
            vec![8.0, 12.0, 16.0, 20.0],
            vec![
                Rule::AllRowsOk { table: "main".into() },
                Rule::DeviationNonincreasing { table: "main".into(), from_u: 12.0 },
                Rule::DeviationBelow { table: "main".into(), u: 20.0, max: 0.05 },
            ],
        ),
        (Some("theorem4"), Op::Product) => (
            "theorem4".into(),
            "power factor",
            "lognormal(0,1)".into(),
            "pareto(1,2)".into(),
            vec![10.0, 100.0],
            main_rules(&[100.0], 0.95, 1.05),
        ),
        (Some(other), _) => return Err(Error::Spec(format!("unknown fixture '{other}' for this command"))),
        (None, _) => {
            let x = args.x.clone().ok_or_else(|| Error::Spec("--x is required without --fixture".into()))?;
            let y = args.y.clone().ok_or_else(|| Error::Spec("--y is required without --fixture".into()))?;
            let grid = parse_grid(args.grid.as_deref().ok_or_else(|| Error::Spec("--grid is required".into()))?)?;
            let rules = main_rules(&grid, 0.95, 1.05);
            ("custom".into(), "dispatched", x, y, grid, rules)
        }
    };
    let grid = match (&args.grid, fixture) {
        (Some(g), Some(_)) => parse_grid(g)?,
        _ => grid,
    };
    let (xm, ym) = (make_model(&x)?, make_model(&y)?);
    let (tail, rule) = match op {
        Op::Sum => sum_tail(&xm, &ym)?,
        Op::Product => product_tail(&xm, &ym)?,
    };
    let table = ratio_table(&xm, &ym, op, &tail, &grid, workers)?;
    let mut d = Draft::new(&name, theorem, json!({ "op": op, "x": x, "y": y, "grid": grid, "rule": rule }));
    d.predicted = Some(tail);
    d.tables.push(named("main", table));
    d.rules = rules;
    Ok(d)
}

fn laplace_report(args: &VerifyArgs, fixture: &str) -> Result<Draft> {
    match fixture {
        "lemma1" => {
            let p = KernelParams::new(2.0, 0.0, 1.0, 1.0)?;
            let grid = match &args.grid {
                Some(g) => parse_grid(g)?,
                None => vec![5.0, 10.0, 15.0],
            };
            let at = *grid.last().expect("nonempty grid");
            let mut d = Draft::new(fixture, "kernel integral", json!({ "params": p, "grid": grid, "deltas": [0.5, 1.0, 2.0] }));
            let names = ["delta=1", "delta=0.5", "delta=2"];
            for (nm, delta) in names.iter().zip([1.0, 0.5, 2.0]) {
                let t = table_from(&grid, |u| integral_i_numeric(u, &p, delta), |u| integral_i_asymptotic(u, &p));
                d.tables.push(named(nm, t));
            }
            d.rules = vec![
                Rule::AllRowsOk { table: "delta=1".into() },
                Rule::RatioBand { table: "delta=1".into(), u: at, lo: 0.98, hi: 1.02 },
                Rule::TablesAgree { tables: names.iter().map(|s| s.to_string()).collect(), u: at, rel: 0.01 },
            ];
            Ok(d)
        }
        "lemma10" => {
            let (sigma, k, alpha, beta) = (2.0f64, 1.0f64, 2.0f64, -3.0f64);
            let prob = LaplaceProblem::new(
                move |z: f64| (sigma - z).powf(beta),
                move |z: f64| k * (sigma - z).powf(-alpha),
                2.0,
                1.0,
            )?;
            let grid = match &args.grid {
                Some(g) => parse_grid(g)?,
                None => vec![100.0, 200.0, 400.0],
            };
            let at = *grid.last().expect("nonempty grid");
            let est: Vec<_> = grid.iter().map(|&u| laplace_general(&prob, u)).collect();
            let t = table_from(
                &grid,
                |u| est[grid.iter().position(|&g| g == u).unwrap()].clone().map(|e| e.numeric),
                |u| est[grid.iter().position(|&g| g == u).unwrap()].clone().map(|e| e.asymptotic),
            );
            let mut d = Draft::new(
                fixture,
                "laplace substitution",
                json!({ "sigma": sigma, "K": k, "alpha": alpha, "beta": beta, "mu": 1.0, "grid": grid }),
            );
            d.tables.push(named("main", t));
            d.rules = main_rules(&[at], 0.98, 1.02);
            d.notes.push(format!("K*sigma^-alpha*u = {} at the last grid point", k * sigma.powf(-alpha) * at));
            Ok(d)
        }
        other => Err(Error::Spec(format!("unknown laplace fixture '{other}'"))),
    }
}

fn watson_report(args: &VerifyArgs, fixture: &str) -> Result<Draft> {
    if fixture != "watson" {
        return Err(Error::Spec(format!("unknown watson fixture '{fixture}'")));
    }
    let mu = args.mu.unwrap_or(1.5);
    let delta = args.delta.unwrap_or(1.0);
    let grid = parse_grid(args.grid.as_deref().unwrap_or("10:100:10"))?;
    let t = table_from(&grid, |u| watson_numeric(u, mu, delta), |u| watson_asymptotic(u, mu));
    let mut d = Draft::new(fixture, "watson", json!({ "mu": mu, "delta": delta, "grid": grid }));
    d.tables.push(named("main", t));
    d.rules.push(Rule::AllRowsOk { table: "main".into() });
    for &u in &grid {
        d.rules.push(Rule::RatioNear { table: "main".into(), u, target: gamma_lr(mu + 1.0, delta * u), tol: 1e-4 });
    }
    Ok(d)
}

pub fn gp_verify(
    preset: &str,
    fixture: &str,
    paths: Option<usize>,
    seed: u64,
    argv: Vec<String>,
    workers: usize,
) -> Result<VerifyReport> {
    let started = Instant::now();
    if preset != "bm" {
        return Err(Error::Spec(format!("unknown preset '{preset}'; only bm has an exact oracle")));
    }
    let bm = TrendModel::brownian();
    let oracle_case = |name: &str, theorem: &str, m: TrendModel, grid: Vec<f64>, tol: f64| -> Result<Draft> {
        let tail = if m.zeta.is_some() { theorem6_tail(&m)? } else { theorem5_tail(&m)? };
        let t = table_from(&grid, |u| bm_exact_oracle_for(&m, u), |u| tail.log_eval(u));
        let at = *grid.last().unwrap();
        let mut d = Draft::new(name, theorem, json!({ "model": m, "grid": grid }));
        d.predicted = Some(tail);
        d.tables.push(named("main", t));
        d.rules = vec![
            Rule::AllRowsOk { table: "main".into() },
            Rule::DeviationBelow { table: "main".into(), u: at, max: tol },
        ];
        Ok(d)
    };
    let draft = match fixture {
        "theorem5-delta0" => oracle_case(fixture, "random trend", bm.with_eta(0.0, 1.0, 1.0), vec![10.0, 100.0, 1000.0], 0.02)?,
        "theorem5-delta" => oracle_case(fixture, "random trend", bm.with_eta(0.3, 1.0, 1.0), vec![10.0, 50.0], 0.02)?,
        "theorem6-1b" => oracle_case(
            fixture,
            "random trend and offset",
            bm.with_eta(0.0, 1.0, 1.0).with_zeta(None, 1.0, 0.5),
            vec![100.0, 1000.0, 10000.0],
            0.05,
        )?,
        "theorem6-1c" => oracle_case(
            fixture,
            "random trend and offset",
            bm.with_eta(0.0, 1.0, 1.0).with_zeta(None, 1.0, 3.0),
            vec![30.0, 100.0, 300.0],
            0.05,
        )?,
        "theorem6-2" => {
            let m = TrendModel { beta: 2.0, ..bm }.with_eta(0.5, 1.0, 1.0).with_zeta(Some(-0.5), 1.0, 1.0);
            let tail = theorem6_tail(&m)?;
            let grid = vec![10.0, 20.0, 40.0];
            let t = table_from(&grid, |u| bounded_offset_surrogate_oracle(&m, u), |u| tail.log_eval(u));
            let mut d = Draft::new(fixture, "random trend and offset", json!({ "model": m, "grid": grid }));
            d.predicted = Some(tail);
            d.tables.push(named("main", t));
            d.rules = vec![
                Rule::AllRowsOk { table: "main".into() },
                Rule::DeviationBelow { table: "main".into(), u: 40.0, max: 0.05 },
            ];
            d.notes.push(
                "Brownian motion has 2H = beta, outside this case; the oracle replaces the supremum by the exact law \
                 of its tail asymptotic (H = 1/2, beta = 2, D(s) = 1/s)"
                    .into(),
            );
            d
        }
        "bm-sup" => {
            let n = paths.unwrap_or(10_000);
            let (horizon, steps, grid) = (50.0, 1 << 16, vec![0.5, 1.0, 1.5]);
            let rows = sup_exceedance(GaussianProcess::Bm, 1.0, 1.0, horizon, steps, &grid, n, seed, workers)?;
            let truth = grid.iter().map(|u| (-2.0 * u).exp()).collect();
            let mut d = Draft::new(fixture, "brownian exact law", json!({ "T": horizon, "steps": steps, "paths": n, "grid": grid }));
            d.estimates.push(NamedEstimates { name: "mc".into(), rows, truth });
            d.rules = grid.iter().map(|&u| Rule::CiReaches { estimates: "mc".into(), u, rel_low: 0.05 }).collect();
            d.notes.push("grid maximum under-samples the supremum; allowance is one-sided".into());
            d
        }
        "bm-conditional" => {
            let n = paths.unwrap_or(100_000);
            let m = bm.with_eta(0.0, 1.0, 1.0).with_zeta(None, 1.0, 3.0);
            let grid = vec![1.0, 5.0, 20.0];
            let (eta, zeta) = (eta_law(&m.eta.unwrap())?, zeta_law(&m.zeta.unwrap())?);
            let rows = bm_conditional_mc(&eta, Some(&zeta), &grid, n, seed, workers)?;
            let truth = grid.iter().map(|&u| bm_exact_oracle_for(&m, u).map(f64::exp)).collect::<Result<_>>()?;
            let mut d = Draft::new(fixture, "brownian exact law", json!({ "model": m, "paths": n, "grid": grid }));
            d.estimates.push(NamedEstimates { name: "mc".into(), rows, truth });
            d.rules = grid.iter().map(|&u| Rule::CiReaches { estimates: "mc".into(), u, rel_low: 0.0 }).collect();
            d
        }
        other => return Err(Error::Spec(format!("unknown gp fixture '{other}'"))),
    };
    Ok(draft.finish(argv, seed, started))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("10:100:10").unwrap().len(), 10);
        assert_eq!(parse_grid("4,6,8").unwrap(), vec![4.0, 6.0, 8.0]);
        assert_eq!(parse_grid("0.1:0.3:0.1").unwrap().len(), 3);
        for bad in ["", "1:2", "3:1:1", "1,1", "a:b:c", "1:2:0"] {
            assert!(parse_grid(bad).is_err(), "{bad}");
        }
    }
}
