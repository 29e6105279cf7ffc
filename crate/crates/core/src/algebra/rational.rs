//! Arbitrary-precision rationals (`num_rational::BigRational`) as a [`Field`].

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use super::field::{json_number_to_f64, Field, FieldKind};
use super::linalg::LinearSolution;
use super::AlgebraError;

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

impl Field for BigRational {
    type Ctx = ();
    const EXACT: bool = true;

    fn kind(_: &()) -> FieldKind {
        FieldKind::Rational
    }
    fn context(&self) {}
    fn zero(_: &()) -> Self {
        <BigRational as Zero>::zero()
    }
    fn one(_: &()) -> Self {
        <BigRational as One>::one()
    }
    fn from_i64(v: i64, _: &()) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_ratio(num: i64, den: i64, _: &()) -> Option<Self> {
        (den != 0).then(|| rat(num, den))
    }
    fn from_f64(v: f64, _: &()) -> Option<Self> {
        <BigRational as FromPrimitive>::from_f64(v)
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn inv(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
    fn abs_le(&self, bound: &Self) -> Option<bool> {
        Some(self.abs() <= *bound)
    }
    fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }
    fn from_json(v: &Value, ctx: &()) -> Result<Self, AlgebraError> {
        match v {
            Value::String(s) => Self::parse(s, ctx),
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(<Self as Field>::from_i64(i, ctx))
                } else {
                    let f = json_number_to_f64(v)?;
                    <BigRational as FromPrimitive>::from_f64(f)
                        .ok_or_else(|| AlgebraError::Parse(format!("non-finite {f}")))
                }
            }
            other => Err(AlgebraError::Parse(format!("expected rational, got {other}"))),
        }
    }
    fn parse(s: &str, _: &()) -> Result<Self, AlgebraError> {
        parse_rational(s)
    }
    fn solve_system(a: Vec<Vec<Self>>, b: Vec<Self>, _: &()) -> LinearSolution<Self> {
        bareiss_solve(a, b)
    }
}

/// Accepts `a`, `a/b` and plain decimals such as `-0.125` (converted exactly).
pub fn parse_rational(s: &str) -> Result<Rational, AlgebraError> {
    let s = s.trim();
    let bad = |e: &dyn std::fmt::Display| AlgebraError::Parse(format!("{s:?}: {e}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|e| bad(&e))?;
        let d: BigInt = d.trim().parse().map_err(|e| bad(&e))?;
        if d.is_zero() {
            return Err(AlgebraError::Parse(format!("{s:?}: zero denominator")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.trim_start().starts_with('-');
        let int_digits = int.trim().trim_start_matches(['-', '+']);
        if !frac.chars().all(|c| c.is_ascii_digit())
            || !int_digits.chars().all(|c| c.is_ascii_digit())
            || (int_digits.is_empty() && frac.is_empty())
        {
            return Err(bad(&"malformed decimal"));
        }
        let digits = format!("{}{}", if int_digits.is_empty() { "0" } else { int_digits }, frac);
        let mut num: BigInt = digits.parse().map_err(|e| bad(&e))?;
        if neg {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), frac.len());
        return Ok(BigRational::new(num, den));
    }
    let n: BigInt = s.parse().map_err(|e| bad(&e))?;
    Ok(BigRational::from_integer(n))
}

/// Fraction-free elimination: rows are cleared of denominators, reduced with
/// Bareiss' exact-division update, then back-substituted over the rationals.
pub fn bareiss_solve(a: Vec<Vec<Rational>>, b: Vec<Rational>) -> LinearSolution<Rational> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<BigInt>> = a
        .into_iter()
        .zip(b)
        .map(|(mut row, rhs)| {
            row.push(rhs);
            let lcm = row
                .iter()
                .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            row.iter()
                .map(|x| x.numer() * (&lcm / x.denom()))
                .collect()
        })
        .collect();

    let mut pivots: Vec<usize> = Vec::new();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..=cols {
                let v = &m[r][c] * &m[i][j] - &m[i][c] * &m[r][j];
                let (q, rem) = v.div_rem(&prev);
                debug_assert!(rem.is_zero(), "Bareiss division must be exact");
                m[i][j] = q;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    let rank = r;
    // Zero rows below the rank must also have a zero right-hand side.
    if (rank..rows).any(|i| !m[i][cols].is_zero()) {
        return LinearSolution::Inconsistent;
    }

    let mut x = vec![<BigRational as Zero>::zero(); cols];
    for (i, &c) in pivots.iter().enumerate().rev() {
        let mut acc = BigRational::from_integer(m[i][cols].clone());
        for j in c + 1..cols {
            if !m[i][j].is_zero() && !Zero::is_zero(&x[j]) {
                acc -= BigRational::from_integer(m[i][j].clone()) * &x[j];
            }
        }
        x[c] = acc / BigRational::from_integer(m[i][c].clone());
    }
    LinearSolution::Solved {
        x,
        rank,
        pivots,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_literal_forms() {
        assert_eq!(parse_rational("3").unwrap(), rat(3, 1));
        assert_eq!(parse_rational("-6/4").unwrap(), rat(-3, 2));
        assert_eq!(parse_rational("0.125").unwrap(), rat(1, 8));
        assert_eq!(parse_rational("-.5").unwrap(), rat(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("1.2.3").is_err());
        assert!(parse_rational("abc").is_err());
    }

    #[test]
    fn lowest_terms_positive_denominator() {
        let r = rat(4, -6);
        assert_eq!(r.numer(), &BigInt::from(-2));
        assert_eq!(r.denom(), &BigInt::from(3));
        assert_eq!(r.to_json(), Value::String("-2/3".into()));
    }

    #[test]
    fn bareiss_square_system() {
        // x + 2y = 5, 3x - y = 1 -> x = 1, y = 2
        let a = vec![vec![rat(1, 1), rat(2, 1)], vec![rat(3, 1), rat(-1, 1)]];
        let b = vec![rat(5, 1), rat(1, 1)];
        match bareiss_solve(a, b) {
            LinearSolution::Solved { x, rank, .. } => {
                assert_eq!(rank, 2);
                assert_eq!(x, vec![rat(1, 1), rat(2, 1)]);
            }
            LinearSolution::Inconsistent => panic!("consistent system"),
        }
    }

    #[test]
    fn bareiss_fractional_and_inconsistent() {
        let a = vec![vec![rat(1, 2), rat(1, 3)], vec![rat(1, 4), rat(1, 6)]];
        assert_eq!(
            bareiss_solve(a.clone(), vec![rat(1, 1), rat(1, 1)]),
            LinearSolution::Inconsistent
        );
        match bareiss_solve(a, vec![rat(1, 1), rat(1, 2)]) {
            LinearSolution::Solved { x, rank, pivots } => {
                assert_eq!(rank, 1);
                assert_eq!(pivots, vec![0]);
                assert_eq!(x, vec![rat(2, 1), rat(0, 1)]);
            }
            LinearSolution::Inconsistent => panic!(),
        }
    }
}
