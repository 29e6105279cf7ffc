//! Independent re-check of a fit report against raw data.
//!
//! Built on `algebra` alone: the report is read as untyped JSON, polynomial
//! models are evaluated with `MultiPoly`, Chebyshev models with a local
//! three-term recurrence. Nothing the report says about its own residuals
//! or agreement is used; only the model, the band and the clean fraction.

use std::collections::BTreeSet;

use byzfit::aggregate::{AnyDataSet, DataSet};
use byzfit::algebra::{parse_poly, sup_norm_on_box, AnyPoly, Field, Fp, MultiPoly, PolyJson, Rational};
use serde_json::{json, Value};

use crate::args::{Format, VerifyArgs};
use crate::{bounding_box, grid_nodes, read_data, CliError, Outcome, EXIT_FAILURE, EXIT_OK};

/// Relative and absolute slack for float band comparisons.
const FLOAT_SLACK: (f64, f64) = (1e-9, 1e-12);

/// A Chebyshev tensor model with affine coordinate and value maps.
struct Cheb {
    degrees: Vec<usize>,
    coeffs: Vec<f64>,
    axes: Vec<(f64, f64)>,
    value: (f64, f64),
}

impl Cheb {
    fn from_json(v: &Value) -> Result<Self, String> {
        let degrees: Vec<usize> = serde_json::from_value(v["degrees"].clone()).map_err(|e| format!("degrees: {e}"))?;
        let mut coeffs = Vec::new();
        flatten(&v["coeffs"], degrees.len(), &mut coeffs)?;
        let want: usize = degrees.iter().map(|d| d + 1).product();
        if coeffs.len() != want {
            return Err(format!("{} coefficients for degrees {degrees:?}", coeffs.len()));
        }
        let map = |m: &Value| -> Result<(f64, f64), String> {
            let s = m["scale"].as_f64().ok_or("map without scale")?;
            let o = m["offset"].as_f64().ok_or("map without offset")?;
            Ok((s, o))
        };
        let axes = match v.get("axes") {
            Some(Value::Array(a)) => a.iter().map(map).collect::<Result<_, _>>()?,
            _ => vec![(1.0, 0.0); degrees.len()],
        };
        let value = match v.get("value") {
            Some(m @ Value::Object(_)) => map(m)?,
            _ => (1.0, 0.0),
        };
        Ok(Cheb {
            degrees,
            coeffs,
            axes,
            value,
        })
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let tables: Vec<Vec<f64>> = self
            .degrees
            .iter()
            .zip(&self.axes)
            .zip(x)
            .map(|((&n, &(s, o)), &c)| {
                let y = s * c + o;
                let mut t = vec![1.0, y];
                for i in 2..=n {
                    t.push(2.0 * y * t[i - 1] - t[i - 2]);
                }
                t.truncate(n + 1);
                t
            })
            .collect();
        let mut sum = 0.0;
        for (flat, c) in self.coeffs.iter().enumerate() {
            let mut rest = flat;
            let mut term = *c;
            for a in (0..self.degrees.len()).rev() {
                let n = self.degrees[a] + 1;
                term *= tables[a][rest % n];
                rest /= n;
            }
            sum += term;
        }
        (sum - self.value.1) / self.value.0
    }
}

fn flatten(v: &Value, depth: usize, out: &mut Vec<f64>) -> Result<(), String> {
    let arr = v.as_array().ok_or("coefficients must be nested arrays")?;
    for item in arr {
        if depth == 1 {
            out.push(item.as_f64().ok_or_else(|| format!("coefficient {item}"))?);
        } else {
            flatten(item, depth - 1, out)?;
        }
    }
    Ok(())
}

enum Candidate {
    Poly(AnyPoly),
    Cheb(Cheb),
}

impl Candidate {
    fn vars(&self) -> usize {
        match self {
            Candidate::Poly(p) => p.vars(),
            Candidate::Cheb(c) => c.degrees.len(),
        }
    }

    fn eval_f64(&self, x: &[f64]) -> f64 {
        match self {
            Candidate::Poly(AnyPoly::Rational(p)) => p.eval_f64(x),
            Candidate::Poly(AnyPoly::Gf(p)) => p.eval_f64(x),
            Candidate::Poly(AnyPoly::Float(p)) => p.eval_f64(x),
            Candidate::Cheb(c) => c.eval(x),
        }
    }
}

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

/// Row agreement for an exact model: which original indices lie outside
/// the band `|z - p(x)| <= delta` (GF(q): centred residue within delta).
fn exact_outside<F: Field>(
    p: &MultiPoly<F>,
    d: &DataSet<F>,
    within: impl Fn(&F) -> bool,
) -> Result<BTreeSet<usize>, CliError> {
    let mut out = BTreeSet::new();
    for (i, (x, z)) in d.iter().enumerate() {
        let r = z.clone() - p.eval(x).map_err(CliError::config)?;
        if !within(&r) {
            out.insert(d.indices()[i]);
        }
    }
    Ok(out)
}

pub fn run(a: &VerifyArgs, format: Format) -> Result<Outcome, CliError> {
    let text = std::fs::read_to_string(&a.report)
        .map_err(|e| CliError::Config(format!("{}: {e}", a.report.display())))?;
    let report: Value =
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", a.report.display())))?;
    let data = read_data(&a.input.data, &a.input.field)?;
    let mut checks = Vec::new();

    if report["status"] != "ok" {
        checks.push(Check {
            name: "status",
            pass: false,
            detail: format!("report records a failed fit: {}", report["failure"]),
        });
        return finish(checks, json!({}), format);
    }
    let candidate = if let Some(p) = report.get("poly") {
        let j: PolyJson = serde_json::from_value(p.clone()).map_err(CliError::config)?;
        Candidate::Poly(AnyPoly::from_json(&j).map_err(CliError::config)?)
    } else if let Some(m) = report.get("model") {
        Candidate::Cheb(Cheb::from_json(m).map_err(CliError::Config)?)
    } else {
        return Err(CliError::Config("report holds no model".into()));
    };
    if candidate.vars() != data.dim() {
        return Err(CliError::Config(format!(
            "model has {} variables, data {}",
            candidate.vars(),
            data.dim()
        )));
    }

    let n = data.len();
    let rho = a.rho.or_else(|| report["rho_clean"].as_f64()).unwrap_or(1.0);
    let need = ((rho * n as f64) - 1e-9).ceil().max(0.0) as usize;
    let band = a.delta.clone().map(Value::String).or_else(|| report.get("delta").cloned());

    let outside: BTreeSet<usize> = match (&candidate, &data) {
        (Candidate::Poly(AnyPoly::Rational(p)), AnyDataSet::Rational(d)) => {
            let delta = match &band {
                Some(v) => <Rational as Field>::from_json(v, &()).map_err(CliError::config)?,
                None => Rational::zero(&()),
            };
            exact_outside(p, d, |r| r.abs_le(&delta).unwrap_or(false))?
        }
        (Candidate::Poly(AnyPoly::Gf(p)), AnyDataSet::Gf(d)) => {
            if p.ctx() != d.ctx() {
                return Err(CliError::Config("model and data live in different fields".into()));
            }
            let delta = match &band {
                Some(v) => <Fp as Field>::from_json(v, p.ctx()).map_err(CliError::config)?.centered().abs(),
                None => 0,
            };
            exact_outside(p, d, |r| r.centered().abs() <= delta)?
        }
        _ => {
            let raw = data.to_float();
            let delta = match &band {
                Some(Value::String(s)) => s
                    .parse::<f64>()
                    .map_err(|_| CliError::Config(format!("band {s:?} is not a number")))?,
                Some(v) => v.as_f64().ok_or_else(|| CliError::Config(format!("band {v}")))?,
                None => report["delta_achieved"].as_f64().unwrap_or(0.0),
            };
            let tol = delta * (1.0 + FLOAT_SLACK.0) + FLOAT_SLACK.1;
            raw.iter()
                .enumerate()
                .filter(|(_, (x, z))| (*z - candidate.eval_f64(x)).abs() > tol)
                .map(|(i, _)| raw.indices()[i])
                .collect()
        }
    };
    let agree = n - outside.len();
    checks.push(Check {
        name: "agreement",
        pass: agree >= need,
        detail: format!("{agree}/{n} rows within the band (need {need} for rho = {rho})"),
    });

    // Exact fits flag exactly the rows outside the band.
    if matches!(candidate, Candidate::Poly(AnyPoly::Rational(_)) | Candidate::Poly(AnyPoly::Gf(_))) {
        let claimed: BTreeSet<usize> = report["flagged"]
            .as_array()
            .map(|a| a.iter().filter_map(Value::as_u64).map(|v| v as usize).collect())
            .unwrap_or_default();
        checks.push(Check {
            name: "flagged",
            pass: claimed == outside,
            detail: format!(
                "reported {:?}, recomputed {:?}",
                claimed.iter().collect::<Vec<_>>(),
                outside.iter().collect::<Vec<_>>()
            ),
        });
    }

    let mut sup = None;
    if let Some(src) = &a.truth {
        let truth = parse_poly(src, data.dim()).map_err(|e| CliError::Config(format!("truth {src:?}: {e}")))?;
        let b = bounding_box(&data.to_float());
        let s = sup_norm_on_box(|x| candidate.eval_f64(x) - truth.eval_f64(x), &b, grid_nodes(b.len()));
        sup = Some(s);
        checks.push(Check {
            name: "truth",
            pass: a.tol.is_none_or(|t| s <= t),
            detail: match a.tol {
                Some(t) => format!("sup |p - truth| = {s:e} (tolerance {t:e})"),
                None => format!("sup |p - truth| = {s:e}"),
            },
        });
    }
    let numbers = json!({
        "rows": n,
        "agree": agree,
        "need": need,
        "rho": rho,
        "outside": outside,
        "sup_vs_truth": sup,
    });
    finish(checks, numbers, format)
}

fn finish(checks: Vec<Check>, numbers: Value, format: Format) -> Result<Outcome, CliError> {
    let pass = checks.iter().all(|c| c.pass);
    let verdict = if pass { "PASS" } else { "FAIL" };
    let text = match format {
        Format::Json => {
            let list: Vec<Value> = checks
                .iter()
                .map(|c| json!({ "check": c.name, "pass": c.pass, "detail": c.detail }))
                .collect();
            let v = json!({ "verdict": verdict, "checks": list, "numbers": numbers });
            format!("{}\n", serde_json::to_string_pretty(&v).expect("plain json"))
        }
        Format::Text => {
            let mut s = format!("{verdict}\n");
            for c in &checks {
                s += &format!("  {} {}: {}\n", if c.pass { "ok  " } else { "FAIL" }, c.name, c.detail);
            }
            s
        }
    };
    Ok(Outcome::Text {
        text,
        code: if pass { EXIT_OK } else { EXIT_FAILURE },
    })
}
