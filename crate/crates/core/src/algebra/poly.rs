//! Sparse multivariate polynomials over a [`Field`].

use std::collections::BTreeMap;
use std::fmt;

use super::field::Field;
use super::monomial::Monomial;
use super::AlgebraError;

/// Total degree; the zero polynomial has degree `NegInfinity`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Degree {
    NegInfinity,
    Finite(u32),
}

impl Degree {
    pub fn finite(self) -> Option<u32> {
        match self {
            Degree::Finite(d) => Some(d),
            Degree::NegInfinity => None,
        }
    }
}

/// Map from exponent vectors to nonzero coefficients, kept in graded-lex order.
#[derive(Clone, PartialEq)]
pub struct MultiPoly<F: Field> {
    vars: usize,
    ctx: F::Ctx,
    terms: BTreeMap<Monomial, F>,
}

impl<F: Field> MultiPoly<F> {
    pub fn zero(vars: usize, ctx: &F::Ctx) -> Self {
        assert!(vars >= 1, "a polynomial needs at least one variable");
        MultiPoly {
            vars,
            ctx: ctx.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: F, vars: usize) -> Self {
        let mut p = Self::zero(vars, &c.context());
        p.add_term(Monomial::one(vars), c);
        p
    }

    pub fn one(vars: usize, ctx: &F::Ctx) -> Self {
        Self::constant(F::one(ctx), vars)
    }

    /// The variable `x_{i+1}` (zero-based `i`).
    pub fn var(i: usize, vars: usize, ctx: &F::Ctx) -> Self {
        assert!(i < vars);
        let mut p = Self::zero(vars, ctx);
        p.add_term(Monomial::var(vars, i), F::one(ctx));
        p
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs; repeated
    /// exponents are summed and zero results dropped.
    pub fn from_terms<I>(vars: usize, ctx: &F::Ctx, terms: I) -> Result<Self, AlgebraError>
    where
        I: IntoIterator<Item = (Vec<u32>, F)>,
    {
        let mut p = Self::zero(vars, ctx);
        for (exps, c) in terms {
            if exps.len() != vars {
                return Err(AlgebraError::DimensionMismatch {
                    expected: vars,
                    got: exps.len(),
                });
            }
            if c.context() != *ctx {
                return Err(AlgebraError::KindMismatch);
            }
            p.add_term(Monomial::new(exps), c);
        }
        Ok(p)
    }

    /// Univariate polynomial in variable `var` from ascending coefficients.
    pub fn univariate(var: usize, vars: usize, ctx: &F::Ctx, coeffs: &[F]) -> Self {
        let mut p = Self::zero(vars, ctx);
        for (k, c) in coeffs.iter().enumerate() {
            p.add_term(Monomial::one(vars).with_exp(var, k as u32), c.clone());
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: F) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            Some(old) => {
                let s = old + c;
                if !s.is_zero() {
                    self.terms.insert(m, s);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn ctx(&self) -> &F::Ctx {
        &self.ctx
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &F)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> F {
        self.terms
            .get(&Monomial::new(exps.to_vec()))
            .cloned()
            .unwrap_or_else(|| F::zero(&self.ctx))
    }

    pub fn total_degree(&self) -> Degree {
        self.terms
            .keys()
            .next_back()
            .map_or(Degree::NegInfinity, |m| Degree::Finite(m.degree()))
    }

    pub fn degree_in(&self, var: usize) -> Degree {
        self.terms
            .keys()
            .map(|m| m.exps()[var])
            .max()
            .map_or(Degree::NegInfinity, Degree::Finite)
    }

    /// True when every term involves only `var`.
    pub fn is_univariate_in(&self, var: usize) -> bool {
        self.terms
            .keys()
            .all(|m| m.exps().iter().enumerate().all(|(i, &e)| i == var || e == 0))
    }

    fn compatible(&self, other: &Self) -> Result<(), AlgebraError> {
        if self.vars != other.vars {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.vars,
                got: other.vars,
            });
        }
        if self.ctx != other.ctx {
            return Err(AlgebraError::KindMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            vars: self.vars,
            ctx: self.ctx.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, s: &F) -> Self {
        let mut out = Self::zero(self.vars, &self.ctx);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.clone() * s.clone());
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        self.compatible(other)?;
        let mut out = Self::zero(self.vars, &self.ctx);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        Ok(out)
    }

    pub fn eval(&self, point: &[F]) -> Result<F, AlgebraError> {
        if point.len() != self.vars {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.vars,
                got: point.len(),
            });
        }
        if point.iter().any(|v| v.context() != self.ctx) {
            return Err(AlgebraError::KindMismatch);
        }
        // Power tables per variable keep evaluation at O(terms * vars).
        let mut powers: Vec<Vec<F>> = point.iter().map(|v| vec![F::one(&self.ctx), v.clone()]).collect();
        let mut acc = F::zero(&self.ctx);
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in m.exps().iter().enumerate() {
                let table = &mut powers[i];
                while table.len() <= e as usize {
                    let next = table[table.len() - 1].clone() * point[i].clone();
                    table.push(next);
                }
                t = t * table[e as usize].clone();
            }
            acc = acc + t;
        }
        Ok(acc)
    }

    /// Float evaluation through `to_f64` on every coefficient.
    pub fn eval_f64(&self, point: &[f64]) -> f64 {
        assert_eq!(point.len(), self.vars);
        self.terms
            .iter()
            .map(|(m, c)| {
                m.exps()
                    .iter()
                    .zip(point)
                    .fold(c.to_f64(), |acc, (&e, &x)| acc * x.powi(e as i32))
            })
            .sum()
    }

    /// Long division by `e`, a univariate polynomial in `var`, treating the
    /// other variables as constants. Returns `(quotient, remainder)` with
    /// `self = quotient * e + remainder` and `deg_var(remainder) < deg(e)`.
    pub fn divide_by_univariate(&self, e: &Self, var: usize) -> Result<(Self, Self), AlgebraError> {
        self.compatible(e)?;
        if var >= self.vars {
            return Err(AlgebraError::DimensionMismatch {
                expected: self.vars,
                got: var + 1,
            });
        }
        if e.is_zero() {
            return Err(AlgebraError::ZeroDivisor);
        }
        if !e.is_univariate_in(var) {
            return Err(AlgebraError::NotUnivariate(var));
        }
        let de = e.degree_in(var).finite().expect("nonzero divisor");
        let lead = e.coeff(Monomial::one(self.vars).with_exp(var, de).exps());
        let lead_inv = lead
            .inv()
            .ok_or_else(|| AlgebraError::NotInvertible(lead.to_string()))?;

        let mut rem = self.clone();
        let mut quot = Self::zero(self.vars, &self.ctx);
        loop {
            // Highest var-degree term among those still divisible.
            let Some((m, c)) = rem
                .terms
                .iter()
                .filter(|(m, _)| m.exps()[var] >= de)
                .max_by(|(a, _), (b, _)| a.exps()[var].cmp(&b.exps()[var]).then_with(|| a.cmp(b)))
                .map(|(m, c)| (m.clone(), c.clone()))
            else {
                break;
            };
            let shift = m.with_exp(var, m.exps()[var] - de);
            let factor = c * lead_inv.clone();
            for (em, ec) in &e.terms {
                rem.add_term(shift.mul(em), -(factor.clone() * ec.clone()));
            }
            quot.add_term(shift, factor);
        }
        Ok((quot, rem))
    }

    /// Coefficient-wise conversion into another field.
    pub fn convert<G: Field>(
        &self,
        ctx: &G::Ctx,
        mut f: impl FnMut(&F) -> Option<G>,
    ) -> Result<MultiPoly<G>, AlgebraError> {
        let mut out = MultiPoly::<G>::zero(self.vars, ctx);
        for (m, c) in &self.terms {
            let g = f(c).ok_or_else(|| AlgebraError::NotInvertible(c.to_string()))?;
            out.add_term(m.clone(), g);
        }
        Ok(out)
    }
}

pub(crate) fn var_name(i: usize, vars: usize) -> String {
    if vars <= 3 {
        ["x", "y", "z"][i].to_string()
    } else {
        format!("x{}", i + 1)
    }
}

impl<F: Field> fmt::Display for MultiPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (n, (m, c)) in self.terms.iter().rev().enumerate() {
            let mono: Vec<String> = m
                .exps()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    let v = var_name(i, self.vars);
                    if e == 1 {
                        v
                    } else {
                        format!("{v}^{e}")
                    }
                })
                .collect();
            let cs = c.to_string();
            let (neg, mag) = match cs.strip_prefix('-') {
                Some(rest) => (true, rest.to_string()),
                None => (false, cs),
            };
            if n == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if mono.is_empty() {
                f.write_str(&mag)?;
            } else {
                if mag != "1" {
                    write!(f, "{mag}*")?;
                }
                f.write_str(&mono.join("*"))?;
            }
        }
        Ok(())
    }
}

impl<F: Field> fmt::Debug for MultiPoly<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly[{}]({})", F::kind(&self.ctx), self)
    }
}
