//! Exact scalar fields, multivariate polynomials and the Chebyshev basis.

pub mod chebyshev;
pub mod expr;
pub mod field;
pub mod fp;
pub mod json;
pub mod linalg;
pub mod monomial;
pub mod poly;
pub mod rational;

pub use chebyshev::{cheb_to_monomial, chebyshev_eval};
pub use expr::parse_poly;
pub use field::{Field, FieldKind};
pub use fp::{Fp, Modulus};
pub use json::{AnyPoly, PolyJson, TermJson};
pub use linalg::LinearSolution;
pub use monomial::{count_monomials, ExponentOrder, Monomial};
pub use poly::{Degree, MultiPoly};
pub use rational::{rat, Rational};

use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum AlgebraError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("scalar kind mismatch")]
    KindMismatch,
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("divisor is not univariate in x{}", .0 + 1)]
    NotUnivariate(usize),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("integer overflow")]
    Overflow,
    #[error("{0} lies outside [-1, 1]")]
    OutOfDomain(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Sup of `|f|` over a tensor grid with `per_axis` nodes per axis on a box.
pub fn sup_norm_on_box(f: impl Fn(&[f64]) -> f64, bounds: &[(f64, f64)], per_axis: usize) -> f64 {
    assert!(per_axis >= 2, "need at least the two endpoints per axis");
    let k = bounds.len();
    let mut idx = vec![0usize; k];
    let mut pt = vec![0.0; k];
    let mut sup = 0.0f64;
    loop {
        for a in 0..k {
            let (lo, hi) = bounds[a];
            pt[a] = lo + (hi - lo) * idx[a] as f64 / (per_axis - 1) as f64;
        }
        sup = sup.max(f(&pt).abs());
        let mut a = 0;
        while a < k {
            idx[a] += 1;
            if idx[a] < per_axis {
                break;
            }
            idx[a] = 0;
            a += 1;
        }
        if a == k {
            return sup;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sup_norm_hits_corners() {
        let s = sup_norm_on_box(|p| p[0] * p[1], &[(-1.0, 1.0), (-2.0, 3.0)], 11);
        assert_eq!(s, 3.0);
    }
}
