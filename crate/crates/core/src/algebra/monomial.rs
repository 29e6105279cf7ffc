//! Exponent vectors and graded-lexicographic enumeration.

use std::cmp::Ordering;
use std::fmt;

use super::AlgebraError;

/// Exponent vector of a monomial `x1^e1 ... xk^ek`.
///
/// `Ord` is graded lex: total degree first, then the exponent of `x1`,
/// then `x2`, and so on (larger exponent sorts later).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn one(vars: usize) -> Self {
        Monomial(vec![0; vars])
    }

    pub fn var(vars: usize, i: usize) -> Self {
        let mut e = vec![0; vars];
        e[i] = 1;
        Monomial(e)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn vars(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub(crate) fn with_exp(&self, var: usize, e: u32) -> Monomial {
        let mut m = self.0.clone();
        m[var] = e;
        Monomial(m)
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// The single canonical ordering used for serialization and system assembly.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ExponentOrder {
    #[default]
    GradedLex,
}

impl ExponentOrder {
    /// Every monomial in `vars` variables of total degree `<= max_degree`,
    /// ascending in this order.
    pub fn enumerate(self, vars: usize, max_degree: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; vars];
        for deg in 0..=max_degree {
            let start = out.len();
            compositions(&mut cur, 0, deg, &mut out);
            out[start..].sort();
        }
        out
    }
}

fn compositions(cur: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<Monomial>) {
    if pos + 1 == cur.len() {
        cur[pos] = remaining;
        out.push(Monomial(cur.to_vec()));
        return;
    }
    for e in 0..=remaining {
        cur[pos] = e;
        compositions(cur, pos + 1, remaining - e, out);
    }
    cur[pos] = 0;
}

/// Number of monomials of total degree `<= d` in `m` variables: `C(d+m, d)`.
pub fn count_monomials(d: u64, m: u64) -> Result<u64, AlgebraError> {
    if m == 0 {
        return Err(AlgebraError::InvalidArgument("at least one variable required".into()));
    }
    binomial(d + m, m.min(d))
}

pub(crate) fn binomial(n: u64, k: u64) -> Result<u64, AlgebraError> {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step.
        acc = acc
            .checked_mul((n - i) as u128)
            .ok_or(AlgebraError::Overflow)?
            / (i as u128 + 1);
        if acc > u64::MAX as u128 {
            return Err(AlgebraError::Overflow);
        }
    }
    Ok(acc as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        assert_eq!(count_monomials(1, 2).unwrap(), 3);
        assert_eq!(count_monomials(2, 2).unwrap(), 6);
        assert_eq!(count_monomials(0, 1).unwrap(), 1);
        assert!(count_monomials(3, 0).is_err());
        assert_eq!(count_monomials(u64::MAX / 2, 40), Err(AlgebraError::Overflow));
    }

    #[test]
    fn degree_two_brute_force() {
        // {1, x, y, x^2, xy, y^2}
        let got = ExponentOrder::GradedLex.enumerate(2, 2);
        let brute: Vec<_> = (0..=2u32)
            .flat_map(|a| (0..=2u32).map(move |b| (a, b)))
            .filter(|(a, b)| a + b <= 2)
            .collect();
        assert_eq!(got.len(), brute.len());
        assert_eq!(
            got.iter().map(|m| m.exps().to_vec()).collect::<Vec<_>>(),
            vec![
                vec![0, 0],
                vec![0, 1],
                vec![1, 0],
                vec![0, 2],
                vec![1, 1],
                vec![2, 0]
            ]
        );
    }

    #[test]
    fn enumeration_cardinality_matches_count() {
        for m in 1..=4usize {
            for d in 0..=8u32 {
                let all = ExponentOrder::GradedLex.enumerate(m, d);
                assert_eq!(all.len() as u64, count_monomials(d as u64, m as u64).unwrap());
                let mut dedup = all.clone();
                dedup.dedup();
                assert_eq!(dedup.len(), all.len(), "duplicates for m={m} d={d}");
                assert!(all.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }
}
