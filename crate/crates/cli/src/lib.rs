//! The `byzfit` command line.
//!
//! Exit codes: 0 success, 2 usage or configuration error, 3 algorithmic
//! failure (the report still records what failed).

pub mod args;
mod cmd;
pub mod verify;

use std::path::Path;
use std::time::Instant;

use byzfit::aggregate::{write_atomic, AnyDataSet};
use byzfit::algebra::{parse_poly, sup_norm_on_box, FieldKind};
use byzfit::report::Status;
use byzfit::{AnyPoly, FitReport};
use serde_json::Value;
use thiserror::Error;

use args::{Cli, Command, Format};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_FAILURE: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn config(e: impl ToString) -> Self {
        CliError::Config(e.to_string())
    }
}

/// What a command produced: a report, or plain text for stdout.
pub enum Outcome {
    Report(Box<FitReport>),
    Text { text: String, code: i32 },
}

pub struct Context {
    pub seed: u64,
    pub format: Format,
    /// Echo of the global flags and the subcommand's arguments.
    pub config: Value,
}

pub fn run(cli: Cli) -> i32 {
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}

fn execute(cli: Cli) -> Result<i32, CliError> {
    if cli.strict && cli.seed.is_none() {
        return Err(CliError::Config("--strict requires --seed".into()));
    }
    if let Some(n) = cli.jobs {
        if n == 0 {
            return Err(CliError::Config("--jobs must be at least 1".into()));
        }
        // Fails only if a pool already exists, e.g. when called twice in one
        // process; the first setting then stays.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let ctx = Context {
        seed: cli.seed.unwrap_or(0),
        format: cli.format,
        config: serde_json::to_value(&cli).map_err(CliError::config)?,
    };
    let start = Instant::now();
    let (outcome, out_path) = match &cli.command {
        Command::Gen(a) => (cmd::gen(a, &ctx)?, None),
        Command::Fit(a) => cmd::fit(&a.method, &ctx)?,
        Command::Filter(a) => (cmd::filter(a, &ctx)?, a.report.as_deref()),
        Command::Aggregate(a) => (cmd::aggregate(a, &ctx)?, a.output.out.as_deref()),
        Command::Eval(a) => (cmd::eval(a, &ctx)?, None),
        Command::Verify(a) => (verify::run(a, ctx.format)?, None),
    };
    match outcome {
        Outcome::Text { text, code } => {
            print!("{text}");
            Ok(code)
        }
        Outcome::Report(mut report) => {
            report.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
            emit(&report, out_path, ctx.format)?;
            Ok(match report.status {
                Status::Ok => EXIT_OK,
                Status::Fail => EXIT_FAILURE,
            })
        }
    }
}

fn emit(report: &FitReport, out: Option<&Path>, format: Format) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(report).map_err(CliError::config)?;
    if let Some(path) = out {
        write_atomic(path, json.as_bytes()).map_err(|e| CliError::Io(e.to_string()))?;
    }
    match format {
        Format::Json => println!("{json}"),
        Format::Text => print!("{}", summary(report)),
    }
    Ok(())
}

fn summary(r: &FitReport) -> String {
    let mut s = format!("{}: {:?}\n", r.command, r.status);
    if let Some(f) = &r.failure {
        s += &format!("  failure: {} ({})\n", f.kind, f.message);
    }
    if let Some(p) = &r.poly {
        if let Ok(p) = AnyPoly::from_json(p) {
            s += &format!("  p = {p}\n");
        }
    }
    if let Some(m) = &r.model {
        s += &format!("  chebyshev model, degrees {:?}\n", m.cheb.degrees);
    }
    if let Some(e) = &r.locator {
        if let Ok(e) = AnyPoly::from_json(e) {
            s += &format!("  e = {e}\n");
        }
    }
    match r.flagged.len() {
        0 => {}
        1..=20 => s += &format!("  flagged = {:?}\n", r.flagged),
        n => s += &format!("  flagged = {n} rows, first {:?}\n", &r.flagged[..10]),
    }
    if let Some(d) = r.delta_achieved {
        s += &format!("  delta_achieved = {d:.6e}\n");
    }
    if let Some(res) = &r.residuals {
        s += &format!("  within band: {}/{}\n", res.within, res.n);
    }
    if let Some(sup) = r.sup_vs_truth {
        s += &format!("  sup |p - truth| = {sup:.6e}\n");
    }
    for w in &r.warnings {
        s += &format!("  warning: {w}\n");
    }
    s
}

/// `rational`, `float`, `gf:Q` (also `gfQ`).
pub fn parse_field(s: &str) -> Result<FieldKind, CliError> {
    let s = s.trim();
    match s {
        "rational" | "q" => Ok(FieldKind::Rational),
        "float" | "f64" => Ok(FieldKind::Float),
        _ => {
            let q = s
                .strip_prefix("gf:")
                .or_else(|| s.strip_prefix("gf"))
                .ok_or_else(|| CliError::Config(format!("unknown field {s:?}; use rational, float or gf:Q")))?;
            let q: u64 = q.parse().map_err(|_| CliError::Config(format!("bad modulus in {s:?}")))?;
            byzfit::Modulus::new(q).map_err(CliError::config)?;
            Ok(FieldKind::PrimeField(q))
        }
    }
}

pub fn read_data(path: &Path, field: &str) -> Result<AnyDataSet, CliError> {
    let data = AnyDataSet::read(path, parse_field(field)?)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if data.is_empty() {
        return Err(CliError::Config(format!("{}: no rows", path.display())));
    }
    Ok(data)
}

/// Fewest variables the expression parses with, at least `min`.
pub fn parse_expr(src: &str, min: usize) -> Result<byzfit::RationalPoly, CliError> {
    let mut last = None;
    for k in min.max(1)..=26 {
        match parse_poly(src, k) {
            Ok(p) => return Ok(p),
            Err(e) => last = Some(e),
        }
    }
    Err(CliError::Config(format!(
        "truth {src:?}: {}",
        last.map(|e| e.to_string()).unwrap_or_default()
    )))
}

/// The truth from `--truth`, else from the manifest.
pub fn resolve_truth(expr: Option<&str>, data: &AnyDataSet) -> Result<Option<AnyPoly>, CliError> {
    if let Some(src) = expr {
        let p = parse_poly(src, data.dim()).map_err(|e| CliError::Config(format!("truth {src:?}: {e}")))?;
        return Ok(Some(AnyPoly::Rational(p)));
    }
    match data.truth() {
        Some(j) => AnyPoly::from_json(j).map(Some).map_err(CliError::config),
        None => Ok(None),
    }
}

/// Per-axis `[min, max]` of the sample coordinates.
pub fn bounding_box(data: &byzfit::FloatData) -> Vec<(f64, f64)> {
    (0..data.dim())
        .map(|a| {
            data.points()
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), p| (l.min(p[a]), h.max(p[a])))
        })
        .map(|(l, h)| if l == h { (l - 0.5, h + 0.5) } else { (l, h) })
        .collect()
}

/// Nodes per axis for sup-norm grids: 101 up to two variables, fewer above.
pub fn grid_nodes(vars: usize) -> usize {
    match vars {
        0..=2 => 101,
        3 => 41,
        _ => 11,
    }
}

pub fn sup_vs_truth(model: impl Fn(&[f64]) -> f64, truth: &AnyPoly, data: &byzfit::FloatData) -> f64 {
    let b = bounding_box(data);
    sup_norm_on_box(|x| model(x) - truth.eval_f64(x), &b, grid_nodes(b.len()))
}
