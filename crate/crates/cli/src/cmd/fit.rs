use std::path::Path;

use byzfit::aggregate::{AnyDataSet, DataSet};
use byzfit::algebra::{Field, MultiPoly};
use byzfit::lpfit::{
    apply_maps, boundedness_audit, build_lp, byzantine_filter, default_grid, derivative_bound_audit, rescale, solve_lp,
    AxisMap, CenterRule, FilterConfig, ScaledCheb, AUDIT_GRID,
};
use byzfit::mvwb::{mv_noise_enumerate_fit, mv_wb_decode, MvProblem};
use byzfit::wb::{
    degree_search, noise_enumerate_fit, wb_decode, EnumerationConfig, NoiseAlphabet, Selection, WbProblem,
};
use byzfit::{FitReport, Model};
use serde_json::json;

use super::{decode_failure, fit_failure, lp_failure, magnitude, residuals};
use crate::args::{Center, FilterOpts, FitMethod, LpArgs, WbArgs};
use crate::{read_data, resolve_truth, sup_vs_truth, CliError, Context, Outcome};

pub fn fit<'a>(m: &'a FitMethod, ctx: &Context) -> Result<(Outcome, Option<&'a Path>), CliError> {
    let (report, out) = match m {
        FitMethod::Wb1d(a) => (fit_wb("wb1d", a, ctx)?, a.output.out.as_deref()),
        FitMethod::Wbmv(a) => (fit_wb("wbmv", a, ctx)?, a.output.out.as_deref()),
        FitMethod::Lp(a) => (fit_lp(a, ctx)?, a.output.out.as_deref()),
    };
    Ok((Outcome::Report(Box::new(report)), out))
}

fn fit_wb(method: &str, a: &WbArgs, ctx: &Context) -> Result<FitReport, CliError> {
    let data = read_data(&a.input.data, &a.input.field)?;
    let truth = resolve_truth(a.output.truth.as_deref(), &data)?;
    let mut report = match &data {
        AnyDataSet::Rational(d) => wb_exact(method, a, d, ctx)?,
        AnyDataSet::Gf(d) => wb_exact(method, a, d, ctx)?,
        AnyDataSet::Float(_) => {
            return Err(CliError::Config(
                "Welch-Berlekamp fits need exact data; use --field rational or gf:Q".into(),
            ))
        }
    };
    if let (Some(t), Some(p)) = (truth, &report.poly) {
        let model = Model::from_json(&byzfit::ModelJson::Poly(p.clone())).map_err(CliError::Config)?;
        report.sup_vs_truth = Some(sup_vs_truth(|x| model.eval_f64(x), &t, &data.to_float()));
    }
    Ok(report)
}

struct Found<F: Field> {
    poly: MultiPoly<F>,
    locator: MultiPoly<F>,
    q: MultiPoly<F>,
}

fn wb_exact<F: Field>(method: &str, a: &WbArgs, d: &DataSet<F>, ctx: &Context) -> Result<FitReport, CliError> {
    let mut report = FitReport::new(method, ctx.config.clone());
    let field = d.ctx().clone();
    let univariate = method == "wb1d";
    match (univariate, d.dim()) {
        (true, 1) | (false, 2..) => {}
        (true, k) => return Err(CliError::Config(format!("wb1d needs 1-variable data, got {k}"))),
        (false, _) => return Err(CliError::Config("wbmv needs at least 2 variables".into())),
    }
    let axis = a
        .axis
        .checked_sub(1)
        .filter(|&x| x < d.dim())
        .ok_or_else(|| CliError::Config(format!("--axis {} is out of range", a.axis)))?;
    if !univariate && a.d_max.is_some() {
        return Err(CliError::Config("--d-max is only available for wb1d".into()));
    }
    let (found, alphabet) = if let Some(t) = a.t {
        let deg = a.d.ok_or_else(|| CliError::Config("--t needs --d".into()))?;
        let n = d.len();
        report.degree = Some(deg);
        report.rho_clean = Some(1.0 - t as f64 / n as f64);
        report.counters.wb_calls = Some(1);
        let res = if univariate {
            let pts = d.iter().map(|(x, z)| (x[0].clone(), z.clone())).collect();
            WbProblem::new(pts, deg, t).and_then(|p| wb_decode(&p)).map(|r| {
                (r.poly, r.error_locator, r.q)
            })
        } else {
            let pts = d.iter().map(|(x, z)| (x.to_vec(), z.clone())).collect();
            MvProblem::with_axis(pts, deg, t, axis)
                .and_then(|p| mv_wb_decode(&p))
                .map(|r| (r.poly, r.error_locator, r.q))
        };
        let zero = F::zero(&field);
        let alphabet = NoiseAlphabet::new(vec![zero.clone()], zero).map_err(CliError::config)?;
        match res {
            Ok((poly, locator, q)) => (Found { poly, locator, q }, alphabet),
            Err(e) => return decode_failure(with_band(report, &alphabet), e),
        }
    } else {
        let alphabet = if let Some(delta) = a.delta {
            NoiseAlphabet::symmetric(delta, &field)
        } else if a.alphabet.is_empty() {
            NoiseAlphabet::new(vec![F::zero(&field)], F::zero(&field))
        } else {
            let offsets = a.alphabet.iter().map(|&o| F::from_i64(o, &field)).collect();
            let band = a.alphabet.iter().map(|o| o.abs()).max().unwrap_or(0);
            NoiseAlphabet::new(offsets, F::from_i64(band, &field))
        }
        .map_err(CliError::config)?;
        report = with_band(report, &alphabet);
        report.rho_clean = Some(a.rho);
        let cfg = EnumerationConfig {
            budget: a.budget,
            selection: if a.shuffle { Selection::Seeded(ctx.seed) } else { Selection::First },
            subset_size: a.subset_size,
        };
        let res = match (univariate, a.d, a.d_max) {
            (true, _, Some(dm)) => degree_search(d, a.rho, &alphabet, dm, &cfg).map(|df| {
                report.extra = Some(json!({ "degree_probes": df.probes }));
                df.fit
            }),
            (_, None, _) => return Err(CliError::Config("--d (or --d-max for wb1d) is required".into())),
            (true, Some(deg), None) => noise_enumerate_fit(d, a.rho, deg, &alphabet, &cfg),
            (false, Some(deg), _) => mv_noise_enumerate_fit(d, a.rho, deg, &alphabet, &cfg, axis),
        };
        match res {
            Ok(fit) => {
                report.degree = Some(fit.degree);
                report.counters.wb_calls = Some(fit.wb_calls);
                report.noise_vector = Some(fit.noise_vector.iter().map(Field::to_json).collect());
                let mut extra = report.extra.take().unwrap_or_else(|| json!({}));
                extra["subset"] = json!(fit.subset.iter().map(|&i| d.indices()[i]).collect::<Vec<_>>());
                extra["error_bound"] = json!(fit.error_bound);
                report.extra = Some(extra);
                (
                    Found {
                        poly: fit.poly,
                        locator: fit.locator,
                        q: fit.q,
                    },
                    alphabet,
                )
            }
            Err(e) => return fit_failure(report, e),
        }
    };
    let mut flagged = Vec::new();
    let mut rows = Vec::with_capacity(d.len());
    for (i, (x, z)) in d.iter().enumerate() {
        let r = z.clone() - found.poly.eval(x).map_err(CliError::config)?;
        let ok = alphabet.within(&r);
        if !ok {
            flagged.push(d.indices()[i]);
        }
        rows.push((magnitude(&r), ok));
    }
    report.residuals = Some(residuals(rows));
    report.flagged = flagged;
    report.poly = Some(found.poly.to_json());
    report.locator = Some(found.locator.to_json());
    report.q = Some(found.q.to_json());
    Ok(report)
}

fn with_band<F: Field>(mut report: FitReport, alphabet: &NoiseAlphabet<F>) -> FitReport {
    report.delta = Some(alphabet.delta().to_json());
    report
}

pub(crate) fn filter_config(d: u32, delta: f64, rho: f64, o: &FilterOpts) -> FilterConfig {
    FilterConfig {
        degree: d,
        delta,
        rho_clean: rho,
        square_halfwidth: o.halfwidth,
        target_count: o.target,
        center_rule: match o.center {
            Center::Median => CenterRule::Median,
            Center::Mean => CenterRule::Mean,
        },
        min_square_count: o.min_square,
    }
}

fn fit_lp(a: &LpArgs, ctx: &Context) -> Result<FitReport, CliError> {
    let data = read_data(&a.input.data, &a.input.field)?;
    let truth = resolve_truth(a.output.truth.as_deref(), &data)?;
    let raw = data.to_float();
    let k = raw.dim();
    if a.filter && a.delta.is_none() {
        return Err(CliError::Config("--filter needs --delta".into()));
    }
    if !(a.rho > 0.0 && a.rho <= 1.0) {
        return Err(CliError::Config(format!("--rho {} is not in (0, 1]", a.rho)));
    }
    let grid = a.grid.unwrap_or_else(|| default_grid(a.d as u32, k));
    let mut report = FitReport::new("lp", ctx.config.clone());
    report.rho_clean = Some(a.rho);
    report.delta = a.delta.map(|d| json!(d));
    let mut r = rescale(&raw).map_err(CliError::config)?;
    if !a.value_range.is_empty() {
        let [lo, hi] = a.value_range[..] else {
            return Err(CliError::Config("--value-range takes lo,hi".into()));
        };
        if !(lo < hi) {
            return Err(CliError::Config(format!("--value-range {lo},{hi} is empty")));
        }
        let outside = raw.values().iter().filter(|&&z| z < lo || z > hi).count();
        if outside > 0 {
            r.warnings.push(format!("{outside} values outside --value-range were clamped"));
        }
        r.value = AxisMap::onto(lo, hi);
        r.data = apply_maps(&raw, &r.axes, &r.value).map_err(CliError::config)?;
    }
    report.warnings.extend(r.warnings.iter().cloned());
    let fit_on = if a.filter {
        // The filter works in rescaled units, so the band scales with values.
        let cfg = filter_config(a.d as u32, a.delta.unwrap() * r.value.scale, a.rho, &a.filter_opts);
        match byzantine_filter(&r.data, &cfg) {
            Ok(out) => {
                let kept: std::collections::BTreeSet<usize> = out.data.indices().iter().copied().collect();
                report.flagged = out.judged().filter(|i| !kept.contains(i)).collect();
                report.flagged.sort_unstable();
                report.counters.filtered = Some(out.data.len());
                report.extra = Some(json!({
                    "squares": out.squares.len(),
                    "judged": out.judged().count(),
                }));
                out.data
            }
            Err(e) => return lp_failure(report, e),
        }
    } else {
        r.data.clone()
    };
    let inst = match build_lp(&fit_on, &vec![a.d; k], grid) {
        Ok(i) => i,
        Err(e) => return lp_failure(report, e),
    };
    let sol = match solve_lp(&inst) {
        Ok(s) => s,
        Err(e) => return lp_failure(report, e),
    };
    report.counters.lp_rows = Some(inst.rows().len());
    report.counters.pivots = Some(sol.pivots);
    let model = ScaledCheb {
        model: sol.model,
        axes: r.axes.clone(),
        value: r.value,
    };
    report.audits = Some(json!({
        "derivative": derivative_bound_audit(&model.model, AUDIT_GRID),
        "boundedness": boundedness_audit(&model.model, grid.max(2), 10),
    }));
    let achieved = model.delta();
    report.delta_achieved = Some(achieved);
    let band = a.delta.unwrap_or(achieved) * (1.0 + 1e-9) + 1e-12;
    report.residuals = Some(residuals(raw.iter().map(|(x, z)| {
        let e = (z - model.eval(x)).abs();
        (e, e <= band)
    })));
    if let Some(t) = truth {
        report.sup_vs_truth = Some(sup_vs_truth(|x| model.eval(x), &t, &raw));
    }
    report.model = Some(model.to_json());
    Ok(report)
}
