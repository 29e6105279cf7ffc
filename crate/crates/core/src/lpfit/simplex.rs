//! Dense revised simplex for `min c^T x  s.t.  A x = b, x >= 0`.
//!
//! Two phases with one artificial per row, Bland's rule for both the
//! entering column and ties in the ratio test, and an explicit basis inverse
//! rebuilt from the original columns every few dozen pivots.

use super::{LpError, Real};

const REFACTOR_EVERY: usize = 64;
const PIVOT_RELATIVE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct StandardForm<T> {
    rows: usize,
    /// Column-major: `cols[j][i] = A[i][j]`.
    cols: Vec<Vec<T>>,
    b: Vec<T>,
    c: Vec<T>,
}

impl<T: Real> StandardForm<T> {
    pub fn new(rows: usize, cols: Vec<Vec<T>>, b: Vec<T>, c: Vec<T>) -> Result<Self, LpError> {
        if b.len() != rows || c.len() != cols.len() || cols.iter().any(|col| col.len() != rows) {
            return Err(LpError::Malformed("standard form dimensions disagree".into()));
        }
        Ok(StandardForm { rows, cols, b, c })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols.len()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome<T> {
    Optimal {
        x: Vec<T>,
        /// Multipliers `y` with `A^T y <= c` and `b^T y` equal to the optimum.
        duals: Vec<T>,
        objective: T,
    },
    /// `y` with `A^T y <= 0` and `b^T y > 0`.
    Infeasible { farkas: Vec<T> },
    /// A feasible direction along which the objective decreases without bound.
    Unbounded { ray: Vec<T> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Run<T> {
    pub outcome: Outcome<T>,
    pub pivots: usize,
}

struct Revised<'a, T> {
    sf: &'a StandardForm<T>,
    /// `-1` where the row was negated to make `b >= 0`.
    sign: Vec<T>,
    b: Vec<T>,
    basis: Vec<usize>,
    binv: Vec<Vec<T>>,
    xb: Vec<T>,
    pivots: usize,
    since_refactor: usize,
    max_pivots: usize,
    tol: T,
}

impl<'a, T: Real> Revised<'a, T> {
    fn new(sf: &'a StandardForm<T>) -> Self {
        let m = sf.rows;
        let sign: Vec<T> = sf
            .b
            .iter()
            .map(|&v| if v < T::zero() { -T::one() } else { T::one() })
            .collect();
        let b: Vec<T> = sf.b.iter().zip(&sign).map(|(&v, &s)| v * s).collect();
        let mut binv = vec![vec![T::zero(); m]; m];
        for (i, row) in binv.iter_mut().enumerate() {
            row[i] = T::one();
        }
        // eps^(2/3): about 4e-11 for f64, 5e-5 for f32.
        let tol = T::epsilon().powf(T::from_f64(2.0 / 3.0).unwrap()) * T::from_f64(10.0).unwrap();
        Revised {
            sf,
            sign,
            xb: b.clone(),
            b,
            basis: (sf.cols.len()..sf.cols.len() + m).collect(),
            binv,
            pivots: 0,
            since_refactor: 0,
            max_pivots: 50 * (m + sf.cols.len()) + 1000,
            tol,
        }
    }

    fn n(&self) -> usize {
        self.sf.cols.len()
    }

    fn is_artificial(&self, j: usize) -> bool {
        j >= self.n()
    }

    fn column(&self, j: usize) -> Vec<T> {
        let m = self.sf.rows;
        if self.is_artificial(j) {
            let mut e = vec![T::zero(); m];
            e[j - self.n()] = T::one();
            e
        } else {
            self.sf.cols[j].iter().zip(&self.sign).map(|(&a, &s)| a * s).collect()
        }
    }

    fn ftran(&self, col: &[T]) -> Vec<T> {
        self.binv
            .iter()
            .map(|row| row.iter().zip(col).fold(T::zero(), |acc, (&a, &b)| acc + a * b))
            .collect()
    }

    fn btran(&self, cost: &impl Fn(usize) -> T) -> Vec<T> {
        let m = self.sf.rows;
        let mut pi = vec![T::zero(); m];
        for (r, &j) in self.basis.iter().enumerate() {
            let cb = cost(j);
            if cb != T::zero() {
                for k in 0..m {
                    pi[k] = pi[k] + cb * self.binv[r][k];
                }
            }
        }
        pi
    }

    fn reduced_cost(&self, j: usize, pi: &[T], cost: &impl Fn(usize) -> T) -> T {
        if self.is_artificial(j) {
            return cost(j) - pi[j - self.n()];
        }
        let col = &self.sf.cols[j];
        let mut acc = T::zero();
        for k in 0..col.len() {
            acc = acc + pi[k] * self.sign[k] * col[k];
        }
        cost(j) - acc
    }

    /// Bland: lowest-index column with negative reduced cost.
    fn entering(&self, pi: &[T], cost: &impl Fn(usize) -> T, allow_artificial: bool) -> Option<usize> {
        let total = if allow_artificial { self.n() + self.sf.rows } else { self.n() };
        let mut in_basis = vec![false; self.n() + self.sf.rows];
        for &j in &self.basis {
            in_basis[j] = true;
        }
        (0..total).find(|&j| !in_basis[j] && self.reduced_cost(j, pi, cost) < -self.tol)
    }

    /// Minimum ratio, ties to the lowest basic variable index. Entries
    /// small relative to the column are passed over while a larger one
    /// exists, which keeps the basis well conditioned.
    fn leaving(&self, u: &[T]) -> Option<usize> {
        let scale = u.iter().fold(T::zero(), |m, &v| m.max(v.abs()));
        let strict = self.tol.max(scale * T::from_f64(PIVOT_RELATIVE).unwrap());
        self.ratio_test(u, strict).or_else(|| self.ratio_test(u, self.tol))
    }

    fn ratio_test(&self, u: &[T], floor: T) -> Option<usize> {
        let mut best: Option<(usize, T)> = None;
        for r in 0..u.len() {
            if u[r] <= floor {
                continue;
            }
            let ratio = self.xb[r].max(T::zero()) / u[r];
            best = match best {
                None => Some((r, ratio)),
                Some((br, bv)) => {
                    let slack = self.tol * (T::one() + bv.abs());
                    if ratio < bv - slack || (ratio <= bv + slack && self.basis[r] < self.basis[br]) {
                        Some((r, ratio))
                    } else {
                        Some((br, bv))
                    }
                }
            };
        }
        best.map(|(r, _)| r)
    }

    fn pivot(&mut self, r: usize, j: usize, u: &[T]) -> Result<(), LpError> {
        let m = self.sf.rows;
        let p = u[r];
        for k in 0..m {
            self.binv[r][k] = self.binv[r][k] / p;
        }
        self.xb[r] = self.xb[r] / p;
        for i in 0..m {
            if i != r && u[i] != T::zero() {
                let f = u[i];
                for k in 0..m {
                    self.binv[i][k] = self.binv[i][k] - f * self.binv[r][k];
                }
                self.xb[i] = self.xb[i] - f * self.xb[r];
            }
        }
        self.basis[r] = j;
        self.pivots += 1;
        self.since_refactor += 1;
        if self.since_refactor >= REFACTOR_EVERY {
            self.refactor()?;
        }
        if self.pivots > self.max_pivots {
            return Err(LpError::Numerical(format!("no convergence after {} pivots", self.pivots)));
        }
        Ok(())
    }

    /// Rebuild `B^-1` and `x_B` from the original columns.
    fn refactor(&mut self) -> Result<(), LpError> {
        let m = self.sf.rows;
        let mut a: Vec<Vec<T>> = vec![vec![T::zero(); 2 * m]; m];
        for (r, &j) in self.basis.iter().enumerate() {
            let col = self.column(j);
            for i in 0..m {
                a[i][r] = col[i];
            }
        }
        for (i, row) in a.iter_mut().enumerate() {
            row[m + i] = T::one();
        }
        for c in 0..m {
            let piv = (c..m)
                .max_by(|&x, &y| a[x][c].abs().partial_cmp(&a[y][c].abs()).unwrap())
                .unwrap();
            if a[piv][c].abs() <= T::epsilon() {
                return Err(LpError::Numerical("basis matrix became singular".into()));
            }
            a.swap(c, piv);
            let p = a[c][c];
            for v in a[c].iter_mut() {
                *v = *v / p;
            }
            for i in 0..m {
                if i != c && a[i][c] != T::zero() {
                    let f = a[i][c];
                    for k in 0..2 * m {
                        a[i][k] = a[i][k] - f * a[c][k];
                    }
                }
            }
        }
        // Columns of `a` were basis positions, so `a`'s right half is B^-1
        // with rows indexed by basis position.
        self.binv = a.into_iter().map(|row| row[m..].to_vec()).collect();
        self.xb = self.ftran(&self.b.clone());
        for v in self.xb.iter_mut() {
            if *v < T::zero() && *v > -self.tol {
                *v = T::zero();
            }
        }
        self.since_refactor = 0;
        Ok(())
    }

    /// Iterate to optimality; `Some(entering, u)` on unboundedness.
    fn optimize(&mut self, cost: &impl Fn(usize) -> T, allow_artificial: bool) -> Result<Option<(usize, Vec<T>)>, LpError> {
        loop {
            let pi = self.btran(cost);
            let Some(j) = self.entering(&pi, cost, allow_artificial) else {
                return Ok(None);
            };
            let mut u = self.ftran(&self.column(j));
            let mut r = self.leaving(&u);
            if r.is_none() && self.since_refactor > 0 {
                // Drift in B^-1 can fake an unbounded column; confirm on
                // a fresh factorisation.
                self.refactor()?;
                u = self.ftran(&self.column(j));
                r = self.leaving(&u);
            }
            let Some(r) = r else {
                return Ok(Some((j, u)));
            };
            self.pivot(r, j, &u)?;
        }
    }

    /// Pivot zero-level artificials out of the basis where possible.
    fn drive_out_artificials(&mut self) -> Result<(), LpError> {
        for r in 0..self.sf.rows {
            if !self.is_artificial(self.basis[r]) {
                continue;
            }
            let mut best: Option<(usize, T)> = None;
            for j in 0..self.n() {
                if self.basis.contains(&j) {
                    continue;
                }
                let col = &self.sf.cols[j];
                let mut alpha = T::zero();
                for k in 0..col.len() {
                    alpha = alpha + self.binv[r][k] * self.sign[k] * col[k];
                }
                if alpha.abs() > self.tol && best.is_none_or(|(_, b)| alpha.abs() > b) {
                    best = Some((j, alpha.abs()));
                }
            }
            // A row with no candidate is redundant; its artificial stays
            // basic at zero and never leaves.
            if let Some((j, _)) = best {
                let u = self.ftran(&self.column(j));
                self.pivot(r, j, &u)?;
            }
        }
        Ok(())
    }

    fn unsign(&self, v: Vec<T>) -> Vec<T> {
        v.into_iter().zip(&self.sign).map(|(a, &s)| a * s).collect()
    }
}

pub fn solve<T: Real>(sf: &StandardForm<T>) -> Result<Run<T>, LpError> {
    let mut s = Revised::new(sf);
    let n = s.n();
    let phase1 = move |j: usize| if j >= n { T::one() } else { T::zero() };
    s.optimize(&phase1, true)?;
    let infeas = s
        .basis
        .iter()
        .zip(&s.xb)
        .filter(|(&j, _)| j >= n)
        .fold(T::zero(), |acc, (_, &v)| acc + v);
    let scale = s.b.iter().fold(T::one(), |m, &v| m.max(v));
    if infeas > T::from_f64(1e-7).unwrap() * scale {
        // Phase-one duals satisfy A^T pi <= 0 on original columns and
        // b^T pi = infeasibility > 0 in the sign-normalised rows.
        let farkas = s.unsign(s.btran(&phase1));
        return Ok(Run {
            outcome: Outcome::Infeasible { farkas },
            pivots: s.pivots,
        });
    }
    s.drive_out_artificials()?;

    let c = &sf.c;
    let phase2 = |j: usize| if j >= n { T::zero() } else { c[j] };
    if let Some((j, u)) = s.optimize(&phase2, false)? {
        let mut ray = vec![T::zero(); n];
        ray[j] = T::one();
        for (r, &bj) in s.basis.iter().enumerate() {
            if bj < n {
                ray[bj] = -u[r];
            }
        }
        return Ok(Run {
            outcome: Outcome::Unbounded { ray },
            pivots: s.pivots,
        });
    }
    s.refactor()?;
    let mut x = vec![T::zero(); n];
    for (r, &j) in s.basis.iter().enumerate() {
        if j < n {
            x[j] = s.xb[r].max(T::zero());
        }
    }
    let objective = x.iter().zip(c).fold(T::zero(), |acc, (&a, &b)| acc + a * b);
    let duals = s.unsign(s.btran(&phase2));
    Ok(Run {
        outcome: Outcome::Optimal { x, duals, objective },
        pivots: s.pivots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sf(a: &[&[f64]], b: &[f64], c: &[f64]) -> StandardForm<f64> {
        let cols = (0..c.len()).map(|j| a.iter().map(|row| row[j]).collect()).collect();
        StandardForm::new(b.len(), cols, b.to_vec(), c.to_vec()).unwrap()
    }

    #[test]
    fn small_optimum_and_duals() {
        // min -x - y  s.t.  x + 2y + s1 = 4,  3x + y + s2 = 6
        let p = sf(&[&[1.0, 2.0, 1.0, 0.0], &[3.0, 1.0, 0.0, 1.0]], &[4.0, 6.0], &[-1.0, -1.0, 0.0, 0.0]);
        let run = solve(&p).unwrap();
        let Outcome::Optimal { x, duals, objective } = run.outcome else { panic!() };
        assert!((x[0] - 1.6).abs() < 1e-12 && (x[1] - 1.2).abs() < 1e-12);
        assert!((objective + 2.8).abs() < 1e-12);
        let by = 4.0 * duals[0] + 6.0 * duals[1];
        assert!((by - objective).abs() < 1e-12);
    }

    #[test]
    fn negative_rhs_rows() {
        // min x  s.t.  -x + s = -2  (x >= 2)
        let p = sf(&[&[-1.0, 1.0]], &[-2.0], &[1.0, 0.0]);
        let Outcome::Optimal { x, duals, .. } = solve(&p).unwrap().outcome else { panic!() };
        assert!((x[0] - 2.0).abs() < 1e-12);
        assert!((duals[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_with_certificate() {
        // x + y = 1 and x + y = 3
        let p = sf(&[&[1.0, 1.0], &[1.0, 1.0]], &[1.0, 3.0], &[0.0, 0.0]);
        let Outcome::Infeasible { farkas } = solve(&p).unwrap().outcome else { panic!() };
        let aty = farkas[0] + farkas[1];
        let by = farkas[0] + 3.0 * farkas[1];
        assert!(aty <= 1e-12);
        assert!(by > 0.0);
    }

    #[test]
    fn unbounded_ray() {
        // min -x  s.t.  x - y = 0
        let p = sf(&[&[1.0, -1.0]], &[0.0], &[-1.0, 0.0]);
        let Outcome::Unbounded { ray } = solve(&p).unwrap().outcome else { panic!() };
        assert!(ray[0] > 0.0 && (ray[0] - ray[1]).abs() < 1e-12);
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Classic cycling example under the largest-coefficient rule.
        let a: &[&[f64]] = &[
            &[0.5, -5.5, -2.5, 9.0, 1.0, 0.0, 0.0],
            &[0.5, -1.5, -0.5, 1.0, 0.0, 1.0, 0.0],
            &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
        ];
        let p = sf(a, &[0.0, 0.0, 1.0], &[-10.0, 57.0, 9.0, 24.0, 0.0, 0.0, 0.0]);
        let Outcome::Optimal { objective, .. } = solve(&p).unwrap().outcome else { panic!() };
        assert!((objective + 1.0).abs() < 1e-9);
    }
}
