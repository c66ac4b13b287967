use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;
use tailward_core::asymptotic_engine::{product_tail, sum_tail};
use tailward_core::gp_extremes::{
    e_const_estimates, fbm_paths, hp_constants, pickands_estimate, theorem5_tail, theorem6_case, theorem6_tail,
    FbmGenerator, GaussianProcess, LimitConstant, PathDump, PickandsMethod, ProcessKind, TrendModel,
};
use tailward_core::montecarlo::write_csv;
use tailward_core::rng::default_workers;
use tailward_core::{make_model, Error, Result};

use crate::report::VerifyReport;
use crate::verify::{self, FIXTURES};
use crate::{Cli, Command, DumpFormat, GpCommand, OpArg, Outcome, PickandsArg};

fn emit<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::Spec(format!("serialization failed: {e}")))?;
    writeln!(out, "{text}").map_err(|e| Error::Spec(format!("write failed: {e}")))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Spec(format!("cannot create {}: {e}", path.display())))
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

pub(crate) fn write_report(report: &VerifyReport, prefix: &Path) -> Result<()> {
    let mut f = create(&with_suffix(prefix, ".json"))?;
    emit(&mut f, report)?;
    for t in &report.tables {
        t.table.write_csv(create(&with_suffix(prefix, &format!(".{}.csv", t.name)))?)?;
    }
    for e in &report.estimates {
        write_csv(&e.rows, create(&with_suffix(prefix, &format!(".{}.csv", e.name)))?)?;
    }
    Ok(())
}

fn finish(report: VerifyReport, out_path: Option<&Path>, out: &mut dyn Write) -> Result<Outcome> {
    if let Some(p) = out_path {
        write_report(&report, p)?;
    }
    emit(out, &report)?;
    Ok(Outcome::Checked(report.pass))
}

fn read_model(arg: &str) -> Result<TrendModel> {
    let text = match arg.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| Error::Spec(format!("cannot read {path}: {e}")))?,
        None => arg.to_string(),
    };
    TrendModel::from_json_str(&text)
}

pub(crate) fn gp_tail_json(model: &TrendModel) -> Result<serde_json::Value> {
    let mut notes = Vec::new();
    let (theorem, case, tail) = if model.zeta.is_some() {
        let case = theorem6_case(model)?;
        ("random trend and offset", Some(case.label()), theorem6_tail(model)?)
    } else {
        ("random trend", None, theorem5_tail(model)?)
    };
    let eta = model.eta.expect("checked by the theorems");
    if eta.delta == 0.0 && tail_uses_sup(model) {
        notes.push(format!(
            "power exponent mu(beta-H)/H = {}; the displayed exponent beta*mu/H is not used",
            eta.mu * (model.beta - model.h) / model.h
        ));
        notes.push(format!("E constant of order beta*mu/H = {}", model.beta * eta.mu / model.h));
    }
    if eta.delta > 0.0 {
        notes.push("edge coefficient of eta^(-H/beta) uses delta^(1+H/beta)".into());
    }
    Ok(json!({ "theorem": theorem, "case": case, "tail": tail, "notes": notes, "model": model }))
}

fn tail_uses_sup(model: &TrendModel) -> bool {
    model.zeta.is_none() || theorem6_case(model).map(|c| c.label() == "1(c)").unwrap_or(false)
}

pub(crate) fn execute(cli: Cli, argv: Vec<String>, out: &mut dyn Write) -> Result<Outcome> {
    let workers = cli.workers.unwrap_or_else(default_workers).max(1);
    match cli.command {
        Command::Tail { op, x, y } => {
            let (xm, ym) = (make_model(&x)?, make_model(&y)?);
            let (tail, _) = match op {
                OpArg::Sum => sum_tail(&xm, &ym)?,
                OpArg::Product => product_tail(&xm, &ym)?,
            };
            emit(out, &tail)?;
            Ok(Outcome::Done)
        }
        Command::Verify(args) => {
            let report = verify::verify(&args, argv, workers)?;
            finish(report, args.out.as_deref(), out)
        }
        Command::Gp(gp) => gp_command(gp, argv, workers, out),
        Command::Replay { report } => {
            let text = std::fs::read_to_string(&report)
                .map_err(|e| Error::Spec(format!("cannot read {}: {e}", report.display())))?;
            let stored: VerifyReport =
                serde_json::from_str(&text).map_err(|e| Error::Spec(format!("not a report: {e}")))?;
            let rechecked = stored.recheck();
            let mut args = vec!["tailward".to_string()];
            args.extend(strip_out(&stored.argv));
            let cli = <Cli as clap::Parser>::try_parse_from(&args)
                .map_err(|e| Error::Spec(format!("stored argv does not parse: {e}")))?;
            let fresh = regenerate(cli, stored.argv.clone())?;
            let same = serde_json::to_string(&fresh.without_runtime()).ok()
                == serde_json::to_string(&stored.without_runtime()).ok();
            emit(out, &json!({ "report": report, "recheck": rechecked, "reproduced": same, "pass": stored.pass }))?;
            Ok(Outcome::Checked(rechecked && same))
        }
        Command::Fixtures => {
            emit(out, &FIXTURES)?;
            Ok(Outcome::Done)
        }
    }
}

fn strip_out(argv: &[String]) -> Vec<String> {
    let mut v = Vec::new();
    let mut it = argv.iter();
    while let Some(a) = it.next() {
        if a == "--out" {
            it.next();
        } else if !a.starts_with("--out=") {
            v.push(a.clone());
        }
    }
    v
}

fn regenerate(cli: Cli, argv: Vec<String>) -> Result<VerifyReport> {
    let workers = cli.workers.unwrap_or_else(default_workers).max(1);
    match cli.command {
        Command::Verify(args) => verify::verify(&args, argv, workers),
        Command::Gp(GpCommand::Verify { preset, fixture, paths, seed, .. }) => {
            verify::gp_verify(&preset, &fixture, paths, seed, argv, workers)
        }
        _ => Err(Error::Spec("the stored command does not produce a report".into())),
    }
}

fn gp_command(gp: GpCommand, argv: Vec<String>, workers: usize, out: &mut dyn Write) -> Result<Outcome> {
    match gp {
        GpCommand::Constants { h, beta, alpha_loc, c, pickands, s_ref, d_ref } => {
            let model = TrendModel {
                process: ProcessKind::Custom,
                h,
                beta,
                alpha_loc,
                limit: LimitConstant { s_ref, d_ref },
                pickands,
                ..TrendModel::brownian()
            };
            emit(out, &hp_constants(&model, c)?)?;
            Ok(Outcome::Done)
        }
        GpCommand::Tail { model } => {
            emit(out, &gp_tail_json(&read_model(&model)?)?)?;
            Ok(Outcome::Done)
        }
        GpCommand::Verify { preset, fixture, paths, seed, out: path } => {
            let report = verify::gp_verify(&preset, &fixture, paths, seed, argv, workers)?;
            finish(report, path.as_deref(), out)
        }
        GpCommand::Fbm { h, steps, horizon, paths, seed, out: path, format } => {
            let g = FbmGenerator::new(h, steps, horizon)?;
            let dump = PathDump { hurst: h, n_steps: steps, horizon, paths: fbm_paths(h, steps, horizon, paths, seed, workers)? };
            let f = create(&path)?;
            match format {
                DumpFormat::Bin => dump.write_binary(f)?,
                DumpFormat::Csv => dump.write_csv(f)?,
            }
            emit(
                out,
                &json!({ "out": path, "format": format!("{format:?}").to_lowercase(), "H": h, "steps": steps,
                         "T": horizon, "paths": paths, "seed": seed, "method": g.method_name() }),
            )?;
            Ok(Outcome::Done)
        }
        GpCommand::Pickands { alpha, horizon, paths, steps, seed, method } => {
            let m = match method {
                PickandsArg::ChangeOfMeasure => PickandsMethod::ChangeOfMeasure,
                PickandsArg::PlugIn => PickandsMethod::PlugIn,
            };
            emit(out, &pickands_estimate(alpha, horizon, paths, steps, seed, workers, m)?)?;
            Ok(Outcome::Done)
        }
        GpCommand::Econst { process, alpha, beta, horizon, paths, steps, seed } => {
            let p: GaussianProcess = process.parse()?;
            let est = e_const_estimates(p, &alpha, beta, horizon, paths, steps, seed, workers)?;
            if est.len() == 1 {
                emit(out, &est[0])?;
            } else {
                emit(out, &est)?;
            }
            Ok(Outcome::Done)
        }
    }
}
