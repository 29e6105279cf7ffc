//! Smallest degree for which the noise-enumeration fit succeeds.

use crate::aggregate::DataSet;
use crate::algebra::Field;

use super::noise::{noise_enumerate_fit, EnumerationConfig, FitError, NoiseAlphabet, NoiseFit};

#[derive(Clone, Debug, PartialEq)]
pub struct DegreeFit<F: Field> {
    pub degree: u32,
    pub fit: NoiseFit<F>,
    /// Degrees tried, in order.
    pub probes: Vec<u32>,
}

/// Binary search over `0..=d_max`, assuming a fit at `d` implies one at
/// every larger degree.
pub fn degree_search<F: Field>(
    data: &DataSet<F>,
    rho_clean: f64,
    alphabet: &NoiseAlphabet<F>,
    d_max: u32,
    cfg: &EnumerationConfig,
) -> Result<DegreeFit<F>, FitError> {
    // Degrees the data cannot host at all would read as "too low" and push
    // the search upward, so cap the range first.
    let mut top = d_max;
    if cfg.subset_size.is_none() {
        while top > 0 && super::noise::subset_size(rho_clean, top, data.len()).is_none() {
            top -= 1;
        }
    }
    let (mut lo, mut hi) = (0i64, top as i64);
    let mut best = None;
    let mut probes = Vec::new();
    while lo <= hi {
        let mid = (lo + hi) / 2;
        probes.push(mid as u32);
        match attempt(data, rho_clean, mid as u32, alphabet, cfg)? {
            Some(fit) => {
                best = Some((mid as u32, fit));
                hi = mid - 1;
            }
            None => lo = mid + 1,
        }
    }
    let (degree, fit) = best.ok_or(FitError::NoDegreeFits { d_max })?;
    Ok(DegreeFit { degree, fit, probes })
}

/// Linear scan from degree 0; the reference the binary search is tested
/// against.
pub fn degree_scan<F: Field>(
    data: &DataSet<F>,
    rho_clean: f64,
    alphabet: &NoiseAlphabet<F>,
    d_max: u32,
    cfg: &EnumerationConfig,
) -> Result<DegreeFit<F>, FitError> {
    let mut probes = Vec::new();
    for d in 0..=d_max {
        probes.push(d);
        if let Some(fit) = attempt(data, rho_clean, d, alphabet, cfg)? {
            return Ok(DegreeFit { degree: d, fit, probes });
        }
    }
    Err(FitError::NoDegreeFits { d_max })
}

/// `Ok(None)` for the failures that mean "this degree does not fit".
fn attempt<F: Field>(
    data: &DataSet<F>,
    rho_clean: f64,
    d: u32,
    alphabet: &NoiseAlphabet<F>,
    cfg: &EnumerationConfig,
) -> Result<Option<NoiseFit<F>>, FitError> {
    match noise_enumerate_fit(data, rho_clean, d, alphabet, cfg) {
        Ok(fit) => Ok(Some(fit)),
        Err(FitError::Exhausted { .. } | FitError::InsufficientData(_)) => Ok(None),
        Err(e) => Err(e),
    }
}
