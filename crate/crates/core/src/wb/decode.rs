//! Error-locator linear system shared by the univariate and multivariate decoders.
//!
//! Unknowns are the coefficients of `q` (every monomial of total degree
//! `<= d + t`, graded-lex order) followed by the `t` free coefficients of the
//! monic locator `e(x_axis) = x_axis^t + e_{t-1} x_axis^{t-1} + ... + e_0`.
//! Row `i` encodes `q(x_i) - z_i * (e(x_i) - x_i^t) = z_i * x_i^t`.

use crate::algebra::{ExponentOrder, Field, LinearSolution, MultiPoly};

use super::DecodeError;

/// A successful decode: `q = poly * locator` holds exactly.
#[derive(Clone, Debug, PartialEq)]
pub struct Decoded<F: Field> {
    pub poly: MultiPoly<F>,
    pub locator: MultiPoly<F>,
    pub q: MultiPoly<F>,
    /// Indices (into the decoded points) where `poly` disagrees with the value.
    pub flagged: Vec<usize>,
}

pub(crate) struct LocatorSystem<'a, F: Field> {
    pub points: &'a [(Vec<F>, F)],
    pub vars: usize,
    pub degree: u32,
    pub errors: usize,
    pub axis: usize,
    pub ctx: F::Ctx,
}

impl<'a, F: Field> LocatorSystem<'a, F> {
    fn solve(&self, t: usize) -> (LinearSolution<F>, usize) {
        let monos = ExponentOrder::GradedLex.enumerate(self.vars, self.degree + t as u32);
        let cols = monos.len() + t;
        let mut rows = Vec::with_capacity(self.points.len());
        let mut rhs = Vec::with_capacity(self.points.len());
        for (x, z) in self.points {
            let mut row = Vec::with_capacity(cols);
            for m in &monos {
                let v = m
                    .exps()
                    .iter()
                    .zip(x)
                    .fold(F::one(&self.ctx), |acc, (&e, xi)| acc * xi.pow(e));
                row.push(v);
            }
            let xa = &x[self.axis];
            let mut power = F::one(&self.ctx);
            for _ in 0..t {
                row.push(-(z.clone() * power.clone()));
                power = power * xa.clone();
            }
            rows.push(row);
            rhs.push(z.clone() * power);
        }
        (F::solve_system(rows, rhs, &self.ctx), cols)
    }

    fn assemble(&self, t: usize, x: &[F]) -> (MultiPoly<F>, MultiPoly<F>) {
        let monos = ExponentOrder::GradedLex.enumerate(self.vars, self.degree + t as u32);
        let q = MultiPoly::from_terms(
            self.vars,
            &self.ctx,
            monos
                .iter()
                .zip(x)
                .map(|(m, c)| (m.exps().to_vec(), c.clone())),
        )
        .expect("monomials have the right arity");
        let mut e_coeffs: Vec<F> = x[monos.len()..].to_vec();
        e_coeffs.push(F::one(&self.ctx));
        let e = MultiPoly::univariate(self.axis, self.vars, &self.ctx, &e_coeffs);
        (q, e)
    }

    fn finish(&self, q: MultiPoly<F>, e: MultiPoly<F>) -> Result<Decoded<F>, DecodeError> {
        let (poly, rem) = q.divide_by_univariate(&e, self.axis)?;
        if !rem.is_zero() {
            return Err(DecodeError::NotDivisible);
        }
        let mut flagged = Vec::new();
        for (i, (x, z)) in self.points.iter().enumerate() {
            if poly.eval(x)? != *z {
                flagged.push(i);
            }
        }
        if flagged.len() > self.errors {
            return Err(DecodeError::TooManyErrors {
                disagreements: flagged.len(),
                bound: self.errors,
            });
        }
        Ok(Decoded {
            poly,
            locator: e,
            q,
            flagged,
        })
    }

    /// Monic factor of degree `extra` whose roots avoid every sample
    /// coordinate on the locator axis.
    fn padding(&self, extra: usize) -> Option<MultiPoly<F>> {
        let mut pad = MultiPoly::one(self.vars, &self.ctx);
        let mut used: Vec<F> = self.points.iter().map(|(x, _)| x[self.axis].clone()).collect();
        let mut c = 0i64;
        let mut tries = 0usize;
        while pad.degree_in(self.axis).finite().unwrap_or(0) < extra as u32 {
            let cand = F::from_i64(c, &self.ctx);
            c += 1;
            tries += 1;
            if tries > self.points.len() + extra + 1 {
                return None;
            }
            if used.contains(&cand) {
                continue;
            }
            let factor =
                MultiPoly::univariate(self.axis, self.vars, &self.ctx, &[-cand.clone(), F::one(&self.ctx)]);
            pad = pad.mul(&factor).ok()?;
            used.push(cand);
        }
        Some(pad)
    }

    pub fn decode(&self) -> Result<Decoded<F>, DecodeError> {
        let t = self.errors;
        let (sol, cols) = self.solve(t);
        let x = match sol {
            LinearSolution::Inconsistent => return Err(DecodeError::Infeasible),
            LinearSolution::Solved { x, rank, .. } if rank == cols => {
                let (q, e) = self.assemble(t, &x);
                return self.finish(q, e);
            }
            LinearSolution::Solved { x, .. } => x,
        };

        // Rank deficient: typically fewer than t corruptions. Find the
        // smallest-locator system with a unique solution and pad its locator
        // back to degree t with roots off the sample.
        for t_small in (0..t).rev() {
            match self.solve(t_small) {
                (LinearSolution::Inconsistent, _) => break,
                (LinearSolution::Solved { x: xs, rank, .. }, cols_small) if rank == cols_small => {
                    let (q, e) = self.assemble(t_small, &xs);
                    if let (Ok(found), Some(pad)) = (self.finish(q, e), self.padding(t - t_small)) {
                        let locator = found.locator.mul(&pad)?;
                        let q = found.poly.mul(&locator)?;
                        return Ok(Decoded {
                            locator,
                            q,
                            ..found
                        });
                    }
                    break;
                }
                _ => continue,
            }
        }
        let (q, e) = self.assemble(t, &x);
        self.finish(q, e)
    }
}
