//! One function per subcommand. Each returns the report it produced, or
//! text for stdout.

mod fit;
mod gen;
mod pipeline;

pub use fit::fit;
pub use gen::gen;
pub use pipeline::{aggregate, eval, filter};

use byzfit::algebra::{Field, FieldKind};
use byzfit::lpfit::LpError;
use byzfit::report::Residuals;
use byzfit::wb::{DecodeError, FitError};
use byzfit::FitReport;

use crate::CliError;

/// `|r|`, reading GF(q) residues as their representative nearest 0.
pub(crate) fn magnitude<F: Field>(r: &F) -> f64 {
    match F::kind(&r.context()) {
        FieldKind::PrimeField(q) => {
            let v = r.to_f64();
            v.min(q as f64 - v)
        }
        _ => r.to_f64().abs(),
    }
}

pub(crate) fn residuals(rows: impl IntoIterator<Item = (f64, bool)>) -> Residuals {
    Residuals::from_rows(rows)
}

/// Configuration problems abort with exit code 2; everything else is an
/// algorithmic failure recorded in the report.
pub(crate) fn fit_failure(report: FitReport, e: FitError) -> Result<FitReport, CliError> {
    let kind = match &e {
        FitError::InsufficientData(_) | FitError::InvalidInput(_) => return Err(CliError::config(e)),
        FitError::Decode(d) => return decode_failure(report, d.clone()),
        FitError::Exhausted { .. } => "Exhausted",
        FitError::BudgetExceeded { .. } => "BudgetExceeded",
        FitError::NoDegreeFits { .. } => "NoDegreeFits",
    };
    Ok(report.fail(kind, e.to_string()))
}

pub(crate) fn decode_failure(report: FitReport, e: DecodeError) -> Result<FitReport, CliError> {
    let kind = match &e {
        DecodeError::InvalidProblem(_) | DecodeError::Algebra(_) => return Err(CliError::config(e)),
        DecodeError::Infeasible => "Infeasible",
        DecodeError::NotDivisible => "NotDivisible",
        DecodeError::TooManyErrors { .. } => "TooManyErrors",
    };
    Ok(report.fail(kind, e.to_string()))
}

pub(crate) fn lp_failure(report: FitReport, e: LpError) -> Result<FitReport, CliError> {
    let kind = match &e {
        LpError::Infeasible { .. } => "Infeasible",
        LpError::Numerical(_) => "Numerical",
        LpError::InsufficientCleanData { .. } => "InsufficientCleanData",
        _ => return Err(CliError::config(e)),
    };
    Ok(report.fail(kind, e.to_string()))
}
