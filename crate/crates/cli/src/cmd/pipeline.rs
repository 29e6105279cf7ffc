use std::collections::{BTreeSet, HashMap};

use byzfit::aggregate::{
    fit_local, merge_hierarchical, AnyDataSet, Cell, FitterConfig, Label, LpFitter, MergePlan, Partition,
    PipelineError, WbFitter,
};
use byzfit::algebra::{Field, Fp, Rational};
use byzfit::lpfit::{byzantine_filter, rescale};
use byzfit::{AnyPoly, FitReport, Model, ModelJson};
use serde_json::{json, Value};

use super::fit::filter_config;
use super::{lp_failure, residuals};
use crate::args::{AggregateArgs, EvalArgs, FilterArgs, FitterKind, Format};
use crate::{read_data, resolve_truth, sup_vs_truth, CliError, Context, Outcome, EXIT_OK};

pub fn filter(a: &FilterArgs, ctx: &Context) -> Result<Outcome, CliError> {
    let data = read_data(&a.input.data, &a.input.field)?;
    let raw = data.to_float();
    let mut report = FitReport::new("filter", ctx.config.clone());
    report.rho_clean = Some(a.rho);
    report.delta = Some(json!(a.delta));
    let r = rescale(&raw).map_err(CliError::config)?;
    report.warnings.extend(r.warnings.iter().cloned());
    let cfg = filter_config(a.d, a.delta * r.value.scale, a.rho, &a.filter_opts);
    let out = match byzantine_filter(&r.data, &cfg) {
        Ok(o) => o,
        Err(e) => return Ok(Outcome::Report(Box::new(lp_failure(report, e)?))),
    };
    let position: HashMap<usize, usize> = raw.indices().iter().enumerate().map(|(p, &i)| (i, p)).collect();
    let kept: Vec<usize> = out.data.indices().iter().map(|i| position[i]).collect();
    let kept_set: BTreeSet<usize> = out.data.indices().iter().copied().collect();
    let judged: Vec<usize> = out.judged().collect();
    report.flagged = judged.iter().copied().filter(|i| !kept_set.contains(i)).collect();
    report.flagged.sort_unstable();
    report.counters.filtered = Some(kept.len());
    let mut extra = json!({
        "rows": raw.len(),
        "judged": judged.len(),
        "kept": kept.len(),
        "squares": out.squares.len(),
        "halfwidth": cfg.halfwidth(),
        "target": cfg.target(),
    });
    if let Some(labels) = data.labels() {
        let corrupt = |i: &usize| labels[position[i]] == Label::Corrupt;
        extra["label_audit"] = json!({
            "corrupt_judged": judged.iter().filter(|i| corrupt(i)).count(),
            "corrupt_kept": kept_set.iter().filter(|i| corrupt(i)).count(),
        });
    }
    report.extra = Some(extra);
    let subset = match &data {
        AnyDataSet::Rational(d) => AnyDataSet::Rational(d.subset(&kept)),
        AnyDataSet::Gf(d) => AnyDataSet::Gf(d.subset(&kept)),
        AnyDataSet::Float(d) => AnyDataSet::Float(d.subset(&kept)),
    };
    subset.write(&a.out).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(Outcome::Report(Box::new(report)))
}

pub fn aggregate(a: &AggregateArgs, ctx: &Context) -> Result<Outcome, CliError> {
    let data = read_data(&a.input.data, &a.input.field)?;
    let truth = resolve_truth(a.output.truth.as_deref(), &data)?;
    let raw = data.to_float();
    let k = raw.dim();
    let part = Partition::bisect(&raw, Cell::bounding(&raw), a.cells).map_err(CliError::Config)?;
    let fitter = match a.fitter {
        FitterKind::Lp => FitterConfig::Lp(LpFitter {
            degrees: vec![a.d; k],
            grid_per_axis: a.grid,
            filter: None,
        }),
        FitterKind::Wb => FitterConfig::Wb(WbFitter {
            degree: a.d as u32,
            rho_clean: a.rho,
            alphabet: if a.alphabet.is_empty() { vec![0] } else { a.alphabet.clone() },
            budget: a.budget,
        }),
    };
    let m = a.resample.unwrap_or_else(|| 4 * fitter.min_samples(k));
    let plan = MergePlan::from_partition(&part, m, fitter);
    let mut report = FitReport::new("aggregate", ctx.config.clone());
    let locals = match fit_local(&data, &part, &plan.fitter) {
        Ok(l) => l,
        Err(e) => return Ok(Outcome::Report(Box::new(pipeline_failure(report, e)?))),
    };
    let cells: Vec<Value> = locals
        .iter()
        .map(|c| {
            json!({
                "cell": c.cell,
                "bounds": c.bounds,
                "samples": c.samples,
                "error": c.model.as_ref().err(),
                "rejected": c.rejected.len(),
                "elapsed_ms": c.elapsed_ms,
            })
        })
        .collect();
    let mut flagged: Vec<usize> = locals.iter().flat_map(|c| c.rejected.iter().copied()).collect();
    flagged.sort_unstable();
    report.flagged = flagged;
    report.extra = Some(json!({ "cells": cells, "plan": plan }));
    let out = match merge_hierarchical(&locals, &plan) {
        Ok(o) => o,
        Err(e) => return Ok(Outcome::Report(Box::new(pipeline_failure(report, e)?))),
    };
    report.warnings = out.warnings.clone();
    let extra = report.extra.as_mut().expect("set above");
    extra["nodes"] = json!(out.nodes);
    extra["level_drift"] = json!(out.level_drift);
    let band = match &out.root {
        Model::Cheb(c) => {
            report.delta_achieved = Some(c.delta());
            report.model = Some(c.to_json());
            c.delta()
        }
        Model::Poly(p) => {
            report.poly = Some(p.to_json());
            a.alphabet.iter().map(|o| o.abs()).max().unwrap_or(0) as f64
        }
    };
    let band = band * (1.0 + 1e-9) + 1e-12;
    report.residuals = Some(residuals(raw.iter().map(|(x, z)| {
        let e = (z - out.root.eval_f64(x)).abs();
        (e, e <= band)
    })));
    if let Some(t) = truth {
        report.sup_vs_truth = Some(sup_vs_truth(|x| out.root.eval_f64(x), &t, &raw));
    }
    Ok(Outcome::Report(Box::new(report)))
}

fn pipeline_failure(report: FitReport, e: PipelineError) -> Result<FitReport, CliError> {
    match &e {
        PipelineError::InvalidPlan(_) => Err(CliError::config(e)),
        PipelineError::AllCellsFailed(_) => Ok(report.fail("AllCellsFailed", e.to_string())),
        PipelineError::Node { .. } => Ok(report.fail("MergeFailed", e.to_string())),
    }
}

/// A model file, or the model inside a report.
pub(crate) fn load_model(path: &std::path::Path) -> Result<Model, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let v: Value = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let inner = if v.get("config").is_some() {
        v.get("poly")
            .or_else(|| v.get("model"))
            .cloned()
            .ok_or_else(|| CliError::Config(format!("{}: report holds no model", path.display())))?
    } else {
        v
    };
    let j: ModelJson = serde_json::from_value(inner).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Model::from_json(&j).map_err(CliError::Config)
}

pub fn eval(a: &EvalArgs, ctx: &Context) -> Result<Outcome, CliError> {
    let model = load_model(&a.model)?;
    let mut values = Vec::new();
    for at in &a.at {
        let coords: Vec<&str> = at.split(',').map(str::trim).collect();
        if coords.len() != model.vars() {
            return Err(CliError::Config(format!(
                "point {at:?} has {} coordinates, the model {}",
                coords.len(),
                model.vars()
            )));
        }
        let value = match &model {
            Model::Poly(AnyPoly::Rational(p)) => exact::<Rational>(p, &coords, &())?,
            Model::Poly(AnyPoly::Gf(p)) => exact::<Fp>(p, &coords, p.ctx())?,
            other => {
                let x = coords
                    .iter()
                    .map(|c| c.parse::<f64>().map_err(|_| CliError::Config(format!("bad coordinate {c:?}"))))
                    .collect::<Result<Vec<_>, _>>()?;
                json!(other.eval_f64(&x))
            }
        };
        values.push((at.clone(), value));
    }
    let text = match ctx.format {
        Format::Json => {
            let rows: Vec<Value> = values.iter().map(|(at, v)| json!({ "at": at, "value": v })).collect();
            format!("{}\n", serde_json::to_string_pretty(&rows).expect("plain json"))
        }
        Format::Text => values
            .iter()
            .map(|(_, v)| match v {
                Value::String(s) => format!("{s}\n"),
                v => format!("{v}\n"),
            })
            .collect(),
    };
    Ok(Outcome::Text { text, code: EXIT_OK })
}

fn exact<F: Field>(p: &byzfit::MultiPoly<F>, coords: &[&str], field: &F::Ctx) -> Result<Value, CliError> {
    let x = coords
        .iter()
        .map(|c| F::parse(c, field).map_err(CliError::config))
        .collect::<Result<Vec<F>, _>>()?;
    let v = p.eval(&x).map_err(CliError::config)?;
    Ok(Value::String(v.to_string()))
}
