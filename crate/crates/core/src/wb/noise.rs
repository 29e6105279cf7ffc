//! Discrete-noise enumeration: try every noise vector over a finite alphabet
//! on a small subset, decode, and accept the first polynomial that agrees
//! with enough of the data.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::aggregate::DataSet;
use crate::algebra::{Field, MultiPoly};

use super::{DecodeError, Decoded, LocatorSystem};

pub const DEFAULT_BUDGET: u64 = 10_000_000;

/// Slack for `ceil`/`floor` of products like `(1 - rho) * n`, so that
/// `rho = 11/12, n = 12` gives exactly one tolerated corruption.
const ROUNDING_SLACK: f64 = 1e-9;

/// Noise offsets in enumeration order, plus the nominal half-width.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseAlphabet<F: Field> {
    offsets: Vec<F>,
    delta: F,
}

impl<F: Field> NoiseAlphabet<F> {
    pub fn new(offsets: Vec<F>, delta: F) -> Result<Self, FitError> {
        if offsets.is_empty() {
            return Err(FitError::InvalidInput("empty noise alphabet".into()));
        }
        if !offsets.iter().any(|o| o.is_zero()) {
            return Err(FitError::InvalidInput("noise alphabet must contain 0".into()));
        }
        for (i, o) in offsets.iter().enumerate() {
            if offsets[..i].contains(o) {
                return Err(FitError::InvalidInput(format!("offset {o} listed twice")));
            }
        }
        Ok(NoiseAlphabet { offsets, delta })
    }

    /// `-delta, ..., -1, 0, 1, ..., delta` as field elements.
    pub fn symmetric(delta: u32, ctx: &F::Ctx) -> Result<Self, FitError> {
        let d = delta as i64;
        let offsets = (-d..=d).map(|v| F::from_i64(v, ctx)).collect();
        Self::new(offsets, F::from_i64(d, ctx))
    }

    pub fn offsets(&self) -> &[F] {
        &self.offsets
    }

    pub fn delta(&self) -> &F {
        &self.delta
    }

    pub fn len(&self) -> usize {
        self.offsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.offsets.is_empty()
    }

    /// `p(x) - y` is within the noise band: `|r| <= delta` in ordered
    /// fields, membership in the alphabet otherwise.
    pub fn within(&self, residual: &F) -> bool {
        match residual.abs_le(&self.delta) {
            Some(b) => b,
            None => self.offsets.contains(residual),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Selection {
    /// The first rows with pairwise distinct decoding coordinate.
    #[default]
    First,
    /// Same rule after a seeded shuffle of the rows.
    Seeded(u64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnumerationConfig {
    /// Maximum number of decoder calls.
    pub budget: u64,
    pub selection: Selection,
    /// Override for `|S'|`; by default the smallest size that decodes.
    pub subset_size: Option<usize>,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        EnumerationConfig {
            budget: DEFAULT_BUDGET,
            selection: Selection::First,
            subset_size: None,
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq)]
pub enum FitError {
    #[error("no noise vector produced an acceptable polynomial ({tried} tried)")]
    Exhausted { tried: u64 },
    #[error("enumeration budget of {budget} decoder calls exhausted ({space} vectors in total)")]
    BudgetExceeded { budget: u64, space: String },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("no degree in 0..={d_max} fits")]
    NoDegreeFits { d_max: u32 },
    #[error(transparent)]
    Decode(#[from] DecodeError),
}

/// Outcome of an accepted noise vector.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseFit<F: Field> {
    pub poly: MultiPoly<F>,
    pub locator: MultiPoly<F>,
    pub q: MultiPoly<F>,
    pub degree: u32,
    /// Positions (in the input set) of the decoding subset.
    pub subset: Vec<usize>,
    /// Offsets added to the subset's values, aligned with `subset`.
    pub noise_vector: Vec<F>,
    /// Original indices of rows where `p` is outside the noise band.
    pub flagged: Vec<usize>,
    pub error_bound: usize,
    pub wb_calls: u64,
}

/// `ceil((1 - rho_clean) * n)`.
pub fn corruption_bound(rho_clean: f64, n: usize) -> usize {
    ((1.0 - rho_clean) * n as f64 - ROUNDING_SLACK).ceil().max(0.0) as usize
}

/// Smallest `n` with `n >= required(t)` where `t = corruption_bound(rho, n)`.
pub(crate) fn smallest_subset(rho_clean: f64, mut required: impl FnMut(usize) -> Option<usize>, cap: usize) -> Option<usize> {
    (1..=cap).find(|&n| required(corruption_bound(rho_clean, n)).is_some_and(|r| n >= r))
}

/// Univariate `|S'| = 2t' + d + 1` with `t' = ceil((1 - rho_clean)|S'|)`.
pub fn subset_size(rho_clean: f64, d: u32, available: usize) -> Option<usize> {
    smallest_subset(rho_clean, |t| Some(2 * t + d as usize + 1), available)
}

pub(crate) fn check_rho(rho_clean: f64) -> Result<(), FitError> {
    if !(rho_clean > 0.0 && rho_clean <= 1.0) {
        return Err(FitError::InvalidInput(format!("rho_clean = {rho_clean} is not in (0, 1]")));
    }
    Ok(())
}

/// Row positions for `S'`: `size` rows whose `axis` coordinates are pairwise
/// distinct.
pub(crate) fn select_subset<F: Field>(
    data: &DataSet<F>,
    axis: usize,
    size: usize,
    selection: Selection,
) -> Result<Vec<usize>, FitError> {
    let mut order: Vec<usize> = (0..data.len()).collect();
    if let Selection::Seeded(seed) = selection {
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    }
    let mut chosen: Vec<usize> = Vec::with_capacity(size);
    for i in order {
        if chosen.len() == size {
            break;
        }
        let x = &data.point(i)[axis];
        if chosen.iter().all(|&j| data.point(j)[axis] != *x) {
            chosen.push(i);
        }
    }
    if chosen.len() < size {
        return Err(FitError::InsufficientData(format!(
            "need {size} rows with distinct x{}, found {}",
            axis + 1,
            chosen.len()
        )));
    }
    Ok(chosen)
}

/// `|A|^n`, or `None` past `u64`.
fn space_size(alphabet: usize, n: usize) -> Option<u64> {
    (alphabet as u64).checked_pow(u32::try_from(n).ok()?)
}

pub(crate) struct Enumeration<'a, F: Field> {
    pub data: &'a DataSet<F>,
    pub alphabet: &'a NoiseAlphabet<F>,
    pub rho_clean: f64,
    pub degree: u32,
    pub subset: Vec<usize>,
    pub errors: usize,
    pub axis: usize,
    pub budget: u64,
}

impl<'a, F: Field> Enumeration<'a, F> {
    fn accepts(&self, poly: &MultiPoly<F>) -> Option<Vec<usize>> {
        let allowed = ((1.0 - self.rho_clean) * self.data.len() as f64 + ROUNDING_SLACK).floor() as usize;
        let mut flagged = Vec::new();
        for (i, (x, z)) in self.data.iter().enumerate() {
            let r = poly.eval(x).ok()? - z.clone();
            if !self.alphabet.within(&r) {
                flagged.push(self.data.indices()[i]);
                if flagged.len() > allowed {
                    return None;
                }
            }
        }
        Some(flagged)
    }

    fn try_vector(&self, index: u64) -> Option<(Decoded<F>, Vec<F>, Vec<usize>)> {
        let a = self.alphabet.len() as u64;
        let n = self.subset.len();
        let mut noise = vec![self.alphabet.offsets[0].clone(); n];
        let mut rest = index;
        for slot in noise.iter_mut().rev() {
            *slot = self.alphabet.offsets[(rest % a) as usize].clone();
            rest /= a;
        }
        let points: Vec<(Vec<F>, F)> = self
            .subset
            .iter()
            .zip(&noise)
            .map(|(&i, v)| (self.data.point(i).to_vec(), self.data.value(i).clone() + v.clone()))
            .collect();
        let sys = LocatorSystem {
            points: &points,
            vars: self.data.dim(),
            degree: self.degree,
            errors: self.errors,
            axis: self.axis,
            ctx: self.data.ctx().clone(),
        };
        let decoded = sys.decode().ok()?;
        let flagged = self.accepts(&decoded.poly)?;
        Some((decoded, noise, flagged))
    }

    /// Lexicographically first accepted vector, searched in parallel.
    pub fn run(self) -> Result<NoiseFit<F>, FitError> {
        let space = space_size(self.alphabet.len(), self.subset.len());
        let limit = match space {
            Some(s) if s <= self.budget => s,
            _ => self.budget,
        };
        let hit = (0..limit)
            .into_par_iter()
            .find_map_first(|i| self.try_vector(i).map(|r| (i, r)));
        match hit {
            Some((i, (decoded, noise_vector, flagged))) => Ok(NoiseFit {
                poly: decoded.poly,
                locator: decoded.locator,
                q: decoded.q,
                degree: self.degree,
                subset: self.subset,
                noise_vector,
                flagged,
                error_bound: self.errors,
                wb_calls: i + 1,
            }),
            None if space == Some(limit) => Err(FitError::Exhausted { tried: limit }),
            None => Err(FitError::BudgetExceeded {
                budget: self.budget,
                space: match space {
                    Some(s) => s.to_string(),
                    None => format!("{}^{}", self.alphabet.len(), self.subset.len()),
                },
            }),
        }
    }
}

/// Univariate fit of degree `d` tolerating a `1 - rho_clean` fraction of
/// corrupted rows and per-row noise drawn from `alphabet`.
///
/// Noise vectors are tried in lexicographic order of the alphabet's listed
/// order; the first polynomial within the noise band on at least
/// `rho_clean` of the whole set is returned.
pub fn noise_enumerate_fit<F: Field>(
    data: &DataSet<F>,
    rho_clean: f64,
    d: u32,
    alphabet: &NoiseAlphabet<F>,
    cfg: &EnumerationConfig,
) -> Result<NoiseFit<F>, FitError> {
    check_rho(rho_clean)?;
    if !F::EXACT {
        return Err(FitError::InvalidInput("noise enumeration needs an exact field".into()));
    }
    if data.dim() != 1 {
        return Err(FitError::InvalidInput(format!(
            "univariate fit on {}-dimensional data",
            data.dim()
        )));
    }
    if alphabet.offsets[0].context() != *data.ctx() {
        return Err(FitError::InvalidInput("alphabet and data live in different fields".into()));
    }
    let size = match cfg.subset_size {
        Some(n) => n,
        None => subset_size(rho_clean, d, data.len()).ok_or_else(|| {
            FitError::InsufficientData(format!("{} rows cannot host a degree-{d} decode", data.len()))
        })?,
    };
    let errors = corruption_bound(rho_clean, size);
    if size < 2 * errors + d as usize + 1 {
        return Err(FitError::InsufficientData(format!(
            "|S'| = {size} is below 2t'+d+1 = {}",
            2 * errors + d as usize + 1
        )));
    }
    let subset = select_subset(data, 0, size, cfg.selection)?;
    Enumeration {
        data,
        alphabet,
        rho_clean,
        degree: d,
        subset,
        errors,
        axis: 0,
        budget: cfg.budget,
    }
    .run()
}
