//! The fitting LP: minimise `delta` over Chebyshev coefficients `c` subject to
//!
//! * `|p(x_k) - z_k| <= delta` for every sample,
//! * `|c_j| <= sqrt(2)` for every coefficient,
//! * `|p(g)| <= 1` on a tensor grid `g`.
//!
//! Every row is stored as `s * (B . c) - band * delta <= rhs` with `s = +-1`.
//! The instance is solved through its dual, which has one equality row per
//! coefficient plus one for `delta`, so the simplex works on a short, wide
//! matrix instead of a tall one.

use std::fmt;

use rayon::prelude::*;

use crate::aggregate::DataSet;

use super::model::{ChebModel, LpScalar, Real};
use super::simplex::{self, Outcome, StandardForm};
use super::LpError;

// `LpScalar` sees both `Float` and `Field` constructors; these pick one.
fn one<T: Real>() -> T {
    T::one()
}

fn zero<T: Real>() -> T {
    T::zero()
}

fn lit<T: Real>(v: f64) -> T {
    T::from_f64(v).unwrap()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RowKind {
    SampleBand,
    CoeffBox,
    GridBound,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint<T> {
    pub kind: RowKind,
    /// Sample position, coefficient index or grid node.
    pub source: usize,
    pub upper: bool,
    /// Basis values (for `CoeffBox`, the unit vector).
    pub coeffs: Vec<T>,
    pub rhs: T,
}

impl<T> Constraint<T> {
    fn band(&self) -> bool {
        self.kind == RowKind::SampleBand
    }
}

impl<T: fmt::Display> fmt::Display for Constraint<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = if self.upper { "upper" } else { "lower" };
        write!(f, "{:?}[{}] {side} (rhs {})", self.kind, self.source, self.rhs)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpInstance<T> {
    degrees: Vec<usize>,
    rows: Vec<Constraint<T>>,
    grid_per_axis: usize,
}

impl<T: LpScalar> LpInstance<T> {
    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn rows(&self) -> &[Constraint<T>] {
        &self.rows
    }

    pub fn grid_per_axis(&self) -> usize {
        self.grid_per_axis
    }

    /// Coefficients plus `delta`.
    pub fn num_vars(&self) -> usize {
        self.num_coeffs() + 1
    }

    pub fn num_coeffs(&self) -> usize {
        self.degrees.iter().map(|d| d + 1).product()
    }

    pub fn count(&self, kind: RowKind) -> usize {
        self.rows.iter().filter(|r| r.kind == kind).count()
    }

    /// Largest violation of any row by `(c, delta)`.
    pub fn max_violation(&self, c: &[T], delta: T) -> T {
        self.rows
            .iter()
            .map(|r| {
                let s = if r.upper { one::<T>() } else { -one::<T>() };
                let dot = r.coeffs.iter().zip(c).fold(zero::<T>(), |a, (&x, &y)| a + x * y);
                let band = if r.band() { delta } else { zero::<T>() };
                s * dot - band - r.rhs
            })
            .fold(zero::<T>(), |m, v| m.max(v))
    }
}

fn check_unit<T: LpScalar>(v: T, row: usize, what: impl FnOnce() -> String) -> Result<(), LpError> {
    let band = lit::<T>(1e-12);
    if !(v.abs() <= one::<T>() + band) {
        return Err(LpError::OutOfRange {
            row,
            what: what(),
            value: num_traits::ToPrimitive::to_f64(&v).unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// Tensor grid with `g` equally spaced nodes per axis on `[-1, 1]`, last
/// axis fastest.
pub fn tensor_grid<T: LpScalar>(vars: usize, g: usize) -> Vec<Vec<T>> {
    if g == 0 {
        return Vec::new();
    }
    let axis: Vec<T> = (0..g)
        .map(|i| lit::<T>(-1.0 + 2.0 * i as f64 / (g - 1).max(1) as f64))
        .collect();
    let mut out = vec![Vec::new()];
    for _ in 0..vars {
        let mut next = Vec::with_capacity(out.len() * g);
        for p in &out {
            for &a in &axis {
                let mut q = p.clone();
                q.push(a);
                next.push(q);
            }
        }
        out = next;
    }
    out
}

/// Assembles the LP for tensor degrees `degrees` (one per variable).
///
/// `grid_per_axis = 0` leaves out the grid rows; 1 is rejected.
pub fn build_lp<T: LpScalar>(
    data: &DataSet<T>,
    degrees: &[usize],
    grid_per_axis: usize,
) -> Result<LpInstance<T>, LpError> {
    if data.is_empty() {
        return Err(LpError::Empty);
    }
    if degrees.len() != data.dim() {
        return Err(LpError::InvalidConfig(format!(
            "{} degrees for {}-variable data",
            degrees.len(),
            data.dim()
        )));
    }
    if grid_per_axis == 1 {
        return Err(LpError::InvalidConfig("a grid needs at least 2 nodes per axis".into()));
    }
    for (i, (x, z)) in data.iter().enumerate() {
        for (a, &c) in x.iter().enumerate() {
            check_unit(c, i, || format!("x{}", a + 1))?;
        }
        check_unit(*z, i, || "z".into())?;
    }
    let clamp = |v: T| v.max(-one::<T>()).min(one::<T>());
    let n = degrees.iter().map(|d| d + 1).product::<usize>();
    let sqrt2 = lit::<T>(std::f64::consts::SQRT_2);

    let samples: Vec<[Constraint<T>; 2]> = data
        .points()
        .par_iter()
        .zip(data.values().par_iter())
        .enumerate()
        .map(|(i, (x, &z))| {
            let x: Vec<T> = x.iter().map(|&c| clamp(c)).collect();
            let b = ChebModel::basis_row(degrees, &x);
            pair(RowKind::SampleBand, i, b, z, -z)
        })
        .collect();
    let grid: Vec<[Constraint<T>; 2]> = tensor_grid::<T>(degrees.len(), grid_per_axis)
        .par_iter()
        .enumerate()
        .map(|(i, g)| pair(RowKind::GridBound, i, ChebModel::basis_row(degrees, g), one::<T>(), one::<T>()))
        .collect();

    let mut rows = Vec::with_capacity(2 * (samples.len() + n + grid.len()));
    rows.extend(samples.into_iter().flatten());
    for j in 0..n {
        let mut e = vec![zero::<T>(); n];
        e[j] = one::<T>();
        rows.extend(pair(RowKind::CoeffBox, j, e, sqrt2, sqrt2));
    }
    rows.extend(grid.into_iter().flatten());
    Ok(LpInstance {
        degrees: degrees.to_vec(),
        rows,
        grid_per_axis,
    })
}

fn pair<T: LpScalar>(kind: RowKind, source: usize, coeffs: Vec<T>, upper_rhs: T, lower_rhs: T) -> [Constraint<T>; 2] {
    [
        Constraint {
            kind,
            source,
            upper: true,
            coeffs: coeffs.clone(),
            rhs: upper_rhs,
        },
        Constraint {
            kind,
            source,
            upper: false,
            coeffs,
            rhs: lower_rhs,
        },
    ]
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution<T> {
    pub model: ChebModel<T>,
    pub pivots: usize,
}

/// Optimal coefficients, recovered as the multipliers of the dual
///
/// `min rhs^T y  s.t.  sum_i s_i B_i y_i = 0,  sum_{band} y_i + w = 1,  y, w >= 0`.
pub fn solve_lp<T: LpScalar>(inst: &LpInstance<T>) -> Result<LpSolution<T>, LpError> {
    let n = inst.num_coeffs();
    let m = n + 1;
    let mut cols = Vec::with_capacity(inst.rows.len() + 1);
    let mut cost = Vec::with_capacity(inst.rows.len() + 1);
    for r in &inst.rows {
        let s = if r.upper { one::<T>() } else { -one::<T>() };
        let mut col: Vec<T> = r.coeffs.iter().map(|&v| s * v).collect();
        col.push(if r.band() { one::<T>() } else { zero::<T>() });
        cols.push(col);
        cost.push(r.rhs);
    }
    let mut w = vec![zero::<T>(); m];
    w[n] = one::<T>();
    cols.push(w);
    cost.push(zero::<T>());
    let mut rhs = vec![zero::<T>(); m];
    rhs[n] = one::<T>();

    let sf = StandardForm::new(m, cols, rhs, cost)?;
    let run = simplex::solve(&sf)?;
    match run.outcome {
        Outcome::Optimal { duals, .. } => {
            let c: Vec<T> = duals[..n].to_vec();
            let delta = (-duals[n]).max(zero::<T>());
            let viol = inst.max_violation(&c, delta);
            let tol = lit::<T>(1e-6).max(T::epsilon().sqrt());
            if viol > tol {
                return Err(LpError::Numerical(format!(
                    "recovered solution violates a row by {viol:?}"
                )));
            }
            Ok(LpSolution {
                model: ChebModel::from_coeffs(inst.degrees.clone(), c, delta)?,
                pivots: run.pivots,
            })
        }
        Outcome::Infeasible { .. } => Err(LpError::Numerical(
            "dual phase one failed although y = 0, w = 1 is feasible".into(),
        )),
        Outcome::Unbounded { ray } => {
            let mut parts: Vec<(usize, T)> = ray[..inst.rows.len()]
                .iter()
                .enumerate()
                .filter(|(_, &v)| v > zero::<T>())
                .map(|(i, &v)| (i, v))
                .collect();
            parts.truncate(8);
            let certificate = parts
                .iter()
                .map(|(i, v)| format!("{v:?} x {}", inst.rows[*i]))
                .collect::<Vec<_>>()
                .join(" + ");
            Err(LpError::Infeasible { certificate })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data(points: Vec<Vec<f64>>, values: Vec<f64>) -> DataSet<f64> {
        let k = points[0].len();
        DataSet::new((), k, points, values).unwrap()
    }

    #[test]
    fn row_counts() {
        let pts: Vec<Vec<f64>> = (0..100)
            .map(|i| vec![(i as f64 / 99.0) * 2.0 - 1.0, ((i * 37 % 100) as f64 / 99.0) * 2.0 - 1.0])
            .collect();
        let inst = build_lp(&data(pts, vec![0.0; 100]), &[3, 3], 16).unwrap();
        assert_eq!(inst.rows().len(), 2 * 100 + 2 * 16 + 2 * 256);
        assert_eq!(inst.num_vars(), 17);
        assert_eq!(inst.count(RowKind::GridBound), 512);
    }

    #[test]
    fn constant_single_sample() {
        let inst = build_lp(&data(vec![vec![0.3, -0.2]], vec![0.7]), &[0, 0], 2).unwrap();
        let sol = solve_lp(&inst).unwrap();
        assert!((sol.model.coeffs()[0] - 0.7).abs() < 1e-12);
        assert_eq!(sol.model.delta_achieved, 0.0);
    }

    #[test]
    fn no_grid_single_sample() {
        let inst = build_lp(&data(vec![vec![0.5, 0.5]], vec![0.25]), &[2, 2], 0).unwrap();
        assert_eq!(inst.count(RowKind::GridBound), 0);
        assert_eq!(solve_lp(&inst).unwrap().model.delta_achieved, 0.0);
    }

    #[test]
    fn out_of_range_and_bad_config() {
        let err = build_lp(&data(vec![vec![0.0, 0.0]], vec![1.5]), &[1, 1], 4).unwrap_err();
        assert!(matches!(err, LpError::OutOfRange { row: 0, .. }));
        assert!(build_lp(&data(vec![vec![0.0, 0.0]], vec![0.5]), &[1, 1], 1).is_err());
        assert!(build_lp(&data(vec![vec![0.0, 0.0]], vec![0.5]), &[1], 4).is_err());
    }

    #[test]
    fn minimax_line_through_three_points() {
        // Best constant for values {0, 1, 0.5} is 0.5 with delta 0.5.
        let inst = build_lp(&data(vec![vec![-1.0], vec![0.0], vec![1.0]], vec![0.0, 1.0, 0.5]), &[0], 0).unwrap();
        let sol = solve_lp(&inst).unwrap();
        assert!((sol.model.coeffs()[0] - 0.5).abs() < 1e-12);
        assert!((sol.model.delta_achieved - 0.5).abs() < 1e-12);
    }

    #[test]
    fn f32_instances_solve_too() {
        let pts: Vec<Vec<f32>> = (0..20).map(|i| vec![-1.0 + i as f32 / 10.0]).collect();
        let vals: Vec<f32> = pts.iter().map(|p| 0.5 * p[0]).collect();
        let inst = build_lp(&DataSet::new((), 1, pts, vals).unwrap(), &[2], 8).unwrap();
        let sol = solve_lp(&inst).unwrap();
        assert!((sol.model.coeffs()[1] - 0.5).abs() < 1e-4);
    }
}
