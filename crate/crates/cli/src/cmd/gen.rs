use byzfit::aggregate::{AnyDataSet, Corruption, Generator, Noise, Truth};
use byzfit::algebra::{parse_poly, Field, Rational};

use crate::args::GenArgs;
use crate::{parse_expr, parse_field, CliError, Context, Outcome, EXIT_OK};

pub fn gen(a: &GenArgs, ctx: &Context) -> Result<Outcome, CliError> {
    let field = parse_field(&a.field)?;
    let truth = match a.vars {
        Some(k) => parse_poly(&a.truth, k).map_err(CliError::config)?,
        None => parse_expr(&a.truth, 1)?,
    };
    let k = truth.vars();
    let mut g = Generator::new(Truth::Poly(truth), field, ctx.seed);
    g.noise = parse_noise(&a.noise)?;
    g.beta = a.beta;
    g.corruption = parse_corruption(&a.corruption)?;
    if !a.lo.is_empty() {
        g.lo = per_axis(&a.lo, k, "--lo")?;
    }
    if !a.hi.is_empty() {
        g.hi = per_axis(&a.hi, k, "--hi")?;
    }
    if !a.value_range.is_empty() {
        let [lo, hi] = a.value_range[..] else {
            return Err(CliError::Config("--value-range takes lo,hi".into()));
        };
        g.value_range = (lo, hi);
    }
    let data = g.generate(a.n).map_err(CliError::config)?;
    let text = match &a.out {
        Some(path) => {
            data.write(path).map_err(|e| CliError::Io(e.to_string()))?;
            format!("wrote {} rows to {}\n", data.len(), path.display())
        }
        None => match &data {
            AnyDataSet::Rational(d) => d.to_csv_string(),
            AnyDataSet::Gf(d) => d.to_csv_string(),
            AnyDataSet::Float(d) => d.to_csv_string(),
        },
    };
    Ok(Outcome::Text { text, code: EXIT_OK })
}

fn per_axis(v: &[f64], k: usize, flag: &str) -> Result<Vec<f64>, CliError> {
    match v.len() {
        1 => Ok(vec![v[0]; k]),
        n if n == k => Ok(v.to_vec()),
        n => Err(CliError::Config(format!("{flag} has {n} values for {k} axes"))),
    }
}

fn rational(s: &str) -> Result<Rational, CliError> {
    <Rational as Field>::parse(s.trim(), &()).map_err(CliError::config)
}

fn number(s: &str, what: &str) -> Result<f64, CliError> {
    s.trim()
        .parse()
        .map_err(|_| CliError::Config(format!("{what}: {s:?} is not a number")))
}

fn parse_noise(s: &str) -> Result<Noise, CliError> {
    let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
    match kind {
        "none" => Ok(Noise::None),
        "uniform" => Ok(Noise::UniformBand(number(arg, "uniform noise width")?)),
        "alphabet" => Ok(Noise::DiscreteAlphabet(
            arg.split(',').map(rational).collect::<Result<_, _>>()?,
        )),
        _ => Err(CliError::Config(format!(
            "noise {s:?}: use none, uniform:DELTA or alphabet:o1,o2,..."
        ))),
    }
}

fn parse_corruption(s: &str) -> Result<Corruption, CliError> {
    let (kind, arg) = s.split_once(':').unwrap_or((s, ""));
    match kind {
        "uniform" => Ok(Corruption::UniformInBox),
        "constant" => Ok(Corruption::Constant(rational(arg)?)),
        "adversarial" => Ok(Corruption::Adversarial(number(arg, "adversarial offset")?)),
        _ => Err(CliError::Config(format!(
            "corruption {s:?}: use uniform, constant:V or adversarial:OFFSET"
        ))),
    }
}
