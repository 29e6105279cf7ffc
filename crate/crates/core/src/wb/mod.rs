//! Univariate Welch-Berlekamp decoding and the discrete-noise enumeration
//! wrapper around it.
//!
//! Throughout, `rho_clean` is the fraction of *uncorrupted* samples. The
//! tolerated number of corrupted points in a set of size `n` is
//! `t = ceil((1 - rho_clean) * n)`.

mod decode;
pub mod degree;
pub mod noise;

pub use decode::Decoded;
pub use degree::{degree_scan, degree_search, DegreeFit};
pub use noise::{
    noise_enumerate_fit, subset_size, EnumerationConfig, FitError, NoiseAlphabet, NoiseFit, Selection, DEFAULT_BUDGET,
};

pub(crate) use decode::LocatorSystem;

use thiserror::Error;

use crate::algebra::{AlgebraError, Field, MultiPoly};

#[derive(Clone, Debug, Error, PartialEq)]
pub enum DecodeError {
    #[error("no (q, e) pair satisfies the sample equations")]
    Infeasible,
    #[error("the error locator does not divide q")]
    NotDivisible,
    #[error("{disagreements} points disagree with the decoded polynomial (bound {bound})")]
    TooManyErrors { disagreements: usize, bound: usize },
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Points with distinct `x`, a degree bound `d` and a corruption bound `t`.
#[derive(Clone, Debug)]
pub struct WbProblem<F: Field> {
    points: Vec<(F, F)>,
    degree_bound: u32,
    error_bound: usize,
}

impl<F: Field> WbProblem<F> {
    pub fn new(points: Vec<(F, F)>, degree_bound: u32, error_bound: usize) -> Result<Self, DecodeError> {
        if !F::EXACT {
            return Err(DecodeError::InvalidProblem(
                "Welch-Berlekamp decoding needs an exact field".into(),
            ));
        }
        let needed = 2 * error_bound + degree_bound as usize + 1;
        if points.len() < needed {
            return Err(DecodeError::InvalidProblem(format!(
                "{} points, need at least 2t+d+1 = {needed}",
                points.len()
            )));
        }
        let ctx = points[0].0.context();
        if points.iter().any(|(x, y)| x.context() != ctx || y.context() != ctx) {
            return Err(AlgebraError::KindMismatch.into());
        }
        if let Some(dup) = first_duplicate(points.iter().map(|(x, _)| x)) {
            return Err(DecodeError::InvalidProblem(format!("repeated x = {dup}")));
        }
        Ok(WbProblem {
            points,
            degree_bound,
            error_bound,
        })
    }

    pub fn points(&self) -> &[(F, F)] {
        &self.points
    }

    pub fn degree_bound(&self) -> u32 {
        self.degree_bound
    }

    pub fn error_bound(&self) -> usize {
        self.error_bound
    }
}

pub(crate) fn first_duplicate<'a, F: Field>(xs: impl Iterator<Item = &'a F>) -> Option<&'a F> {
    let seen: Vec<&F> = xs.collect();
    for (i, a) in seen.iter().enumerate() {
        if seen[..i].contains(a) {
            return Some(a);
        }
    }
    None
}

#[derive(Clone, Debug, PartialEq)]
pub struct WbResult<F: Field> {
    pub poly: MultiPoly<F>,
    pub error_locator: MultiPoly<F>,
    pub q: MultiPoly<F>,
    /// Indices of points where `poly(x_i) != y_i`.
    pub flagged: Vec<usize>,
}

/// Solves `q(x_i) = y_i e(x_i)` with `e` monic of degree `t`, then returns
/// `p = q / e` if the division is exact and `p` disagrees with at most `t`
/// points.
pub fn wb_decode<F: Field>(prob: &WbProblem<F>) -> Result<WbResult<F>, DecodeError> {
    let ctx = prob.points[0].0.context();
    let pts: Vec<(Vec<F>, F)> = prob
        .points
        .iter()
        .map(|(x, y)| (vec![x.clone()], y.clone()))
        .collect();
    let sys = LocatorSystem {
        points: &pts,
        vars: 1,
        degree: prob.degree_bound,
        errors: prob.error_bound,
        axis: 0,
        ctx,
    };
    let d = sys.decode()?;
    Ok(WbResult {
        poly: d.poly,
        error_locator: d.locator,
        q: d.q,
        flagged: d.flagged,
    })
}
