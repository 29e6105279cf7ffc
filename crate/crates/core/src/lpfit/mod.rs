//! Chebyshev-basis l-infinity fitting by linear programming, with the
//! square-neighbourhood Byzantine filter in front of it.
//!
//! All data handed to the LP must already lie in `[-1, 1]` on every axis
//! and in value; [`rescale`] produces such data together with the maps back.

pub mod audit;
pub mod calibration;
pub mod filter;
pub mod lp;
pub mod model;
pub mod rescale;
pub mod simplex;

pub use audit::{
    boundedness_audit, boundedness_term, derivative_bound_audit, sup_distance, BoundednessAudit, DerivativeAudit, AUDIT_GRID,
};
pub use filter::{byzantine_filter, replay_filter, CenterRule, FilterConfig, FilterOutcome, Square};
pub use lp::{build_lp, solve_lp, Constraint, LpInstance, LpSolution, RowKind};
pub use model::{ChebJson, ChebModel, LpScalar, Real};
pub use rescale::{apply_maps, rescale, AxisMap, Rescaled, ScaledCheb, ScaledChebJson};

use thiserror::Error;

use crate::aggregate::DataSet;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum LpError {
    #[error("malformed model: {0}")]
    Malformed(String),
    #[error("row {row}: {what} = {value} lies outside [-1, 1]")]
    OutOfRange { row: usize, what: String, value: f64 },
    #[error("no samples")]
    Empty,
    #[error("LP infeasible; certificate: {certificate}")]
    Infeasible { certificate: String },
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("filter kept {kept} points, needed more than {target}")]
    InsufficientCleanData { kept: usize, target: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// `max(ceil(c * d^2/delta * ln(d/delta)), (d+1)^2)`.
pub fn sample_size(d: u32, delta: f64, c: f64) -> Result<usize, LpError> {
    if d < 1 {
        return Err(LpError::InvalidConfig("degree must be at least 1".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(LpError::InvalidConfig(format!("delta = {delta} is not in (0, 1)")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(LpError::InvalidConfig(format!("sample constant C = {c} must be positive")));
    }
    let d = d as f64;
    let theory = (c * d * d / delta * (d / delta).ln()).ceil();
    let floor = (d + 1.0) * (d + 1.0);
    Ok(theory.max(floor) as usize)
}

/// `ceil(d^4 ln(1/delta) / delta)`, the point count suggested for the
/// filtering stage.
pub fn elimination_sample_size(d: u32, delta: f64) -> Result<usize, LpError> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(LpError::InvalidConfig(format!("delta = {delta} is not in (0, 1)")));
    }
    let d = d as f64;
    Ok((d.powi(4) * (1.0 / delta).ln() / delta).ceil() as usize)
}

/// Grid nodes per axis: `d^5` capped at 64 (16 beyond two variables), at
/// least 2.
pub fn default_grid(d: u32, vars: usize) -> usize {
    let cap: u64 = if vars <= 2 { 64 } else { 16 };
    (d as u64).saturating_pow(5).clamp(2, cap) as usize
}

/// Result of [`fit_robust`].
#[derive(Clone, Debug)]
pub struct RobustFit {
    pub model: ChebModel<f64>,
    pub filtered: DataSet<f64>,
    pub squares: Vec<Square>,
    pub lp_rows: usize,
    pub pivots: usize,
}

/// Filter, then fit an LP model of the given per-axis degrees on what is left.
pub fn fit_robust(
    data: &DataSet<f64>,
    cfg: &FilterConfig,
    degrees: &[usize],
    grid_per_axis: usize,
) -> Result<RobustFit, LpError> {
    let outcome = byzantine_filter(data, cfg)?;
    let inst = build_lp(&outcome.data, degrees, grid_per_axis)?;
    let sol = solve_lp(&inst)?;
    Ok(RobustFit {
        model: sol.model,
        filtered: outcome.data,
        squares: outcome.squares,
        lp_rows: inst.rows().len(),
        pivots: sol.pivots,
    })
}
