//! Multivariate Welch-Berlekamp decoding with an error locator that is
//! univariate in one designated axis (default `x1`), and its noise wrapper.

use crate::aggregate::DataSet;
use crate::algebra::monomial::binomial;
use crate::algebra::{AlgebraError, Field, MultiPoly};
use crate::wb::noise::{check_rho, corruption_bound, select_subset, smallest_subset, Enumeration};
use crate::wb::{first_duplicate, DecodeError, EnumerationConfig, FitError, LocatorSystem, NoiseAlphabet, NoiseFit};

/// `t + C(d + t + m, m)`: the coefficients of `q` (total degree `d + t` in
/// `m` variables) plus the `t` free coefficients of a monic locator.
pub fn required_sample_size(d: u32, m: usize, t: usize) -> Result<usize, AlgebraError> {
    let n = d as u64 + t as u64 + m as u64;
    let c = binomial(n, m as u64)?;
    c.checked_add(t as u64)
        .and_then(|v| usize::try_from(v).ok())
        .ok_or(AlgebraError::Overflow)
}

#[derive(Clone, Debug)]
pub struct MvProblem<F: Field> {
    points: Vec<(Vec<F>, F)>,
    vars: usize,
    degree: u32,
    errors: usize,
    axis: usize,
}

impl<F: Field> MvProblem<F> {
    /// Locator in `x1`.
    pub fn new(points: Vec<(Vec<F>, F)>, degree: u32, errors: usize) -> Result<Self, DecodeError> {
        Self::with_axis(points, degree, errors, 0)
    }

    pub fn with_axis(
        points: Vec<(Vec<F>, F)>,
        degree: u32,
        errors: usize,
        axis: usize,
    ) -> Result<Self, DecodeError> {
        if !F::EXACT {
            return Err(DecodeError::InvalidProblem("decoding needs an exact field".into()));
        }
        let Some((first, _)) = points.first() else {
            return Err(DecodeError::InvalidProblem("no points".into()));
        };
        let vars = first.len();
        if vars < 2 {
            return Err(DecodeError::InvalidProblem(
                "multivariate decoding needs at least 2 variables".into(),
            ));
        }
        if axis >= vars {
            return Err(DecodeError::InvalidProblem(format!("axis x{} out of range", axis + 1)));
        }
        for (x, _) in &points {
            if x.len() != vars {
                return Err(AlgebraError::DimensionMismatch {
                    expected: vars,
                    got: x.len(),
                }
                .into());
            }
        }
        let ctx = first[0].context();
        if points
            .iter()
            .any(|(x, z)| z.context() != ctx || x.iter().any(|c| c.context() != ctx))
        {
            return Err(AlgebraError::KindMismatch.into());
        }
        let needed = required_sample_size(degree, vars, errors)?;
        if points.len() < needed {
            return Err(DecodeError::InvalidProblem(format!(
                "{} points, need at least t + C(d+t+m, m) = {needed}",
                points.len()
            )));
        }
        if let Some(dup) = first_duplicate(points.iter().map(|(x, _)| &x[axis])) {
            let best = most_distinct_axis(&points, vars);
            return Err(DecodeError::InvalidProblem(format!(
                "x{} value {dup} repeats; x{} has the most distinct values",
                axis + 1,
                best + 1
            )));
        }
        Ok(MvProblem {
            points,
            vars,
            degree,
            errors,
            axis,
        })
    }

    pub fn points(&self) -> &[(Vec<F>, F)] {
        &self.points
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn axis(&self) -> usize {
        self.axis
    }
}

fn most_distinct_axis<F: Field>(points: &[(Vec<F>, F)], vars: usize) -> usize {
    (0..vars)
        .max_by_key(|&a| {
            let mut seen: Vec<&F> = Vec::new();
            for (x, _) in points {
                if !seen.contains(&&x[a]) {
                    seen.push(&x[a]);
                }
            }
            (seen.len(), std::cmp::Reverse(a))
        })
        .unwrap_or(0)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MvResult<F: Field> {
    pub poly: MultiPoly<F>,
    /// Monic, degree exactly `t`, univariate in the decoding axis.
    pub error_locator: MultiPoly<F>,
    pub q: MultiPoly<F>,
    pub flagged: Vec<usize>,
}

/// Solves `z_i e(x_i) = q(x_i, y_i, ...)` and divides.
pub fn mv_wb_decode<F: Field>(prob: &MvProblem<F>) -> Result<MvResult<F>, DecodeError> {
    let sys = LocatorSystem {
        points: &prob.points,
        vars: prob.vars,
        degree: prob.degree,
        errors: prob.errors,
        axis: prob.axis,
        ctx: prob.points[0].1.context(),
    };
    let d = sys.decode()?;
    Ok(MvResult {
        poly: d.poly,
        error_locator: d.locator,
        q: d.q,
        flagged: d.flagged,
    })
}

/// Multivariate counterpart of [`crate::wb::noise_enumerate_fit`], decoding
/// along `axis`.
pub fn mv_noise_enumerate_fit<F: Field>(
    data: &DataSet<F>,
    rho_clean: f64,
    d: u32,
    alphabet: &NoiseAlphabet<F>,
    cfg: &EnumerationConfig,
    axis: usize,
) -> Result<NoiseFit<F>, FitError> {
    check_rho(rho_clean)?;
    if !F::EXACT {
        return Err(FitError::InvalidInput("noise enumeration needs an exact field".into()));
    }
    let m = data.dim();
    if m < 2 {
        return Err(FitError::InvalidInput("multivariate fit needs at least 2 variables".into()));
    }
    if axis >= m {
        return Err(FitError::InvalidInput(format!("axis x{} out of range", axis + 1)));
    }
    if alphabet.offsets()[0].context() != *data.ctx() {
        return Err(FitError::InvalidInput("alphabet and data live in different fields".into()));
    }
    let size = match cfg.subset_size {
        Some(n) => n,
        None => smallest_subset(rho_clean, |t| required_sample_size(d, m, t).ok(), data.len())
            .ok_or_else(|| {
                FitError::InsufficientData(format!("{} rows cannot host a degree-{d} decode", data.len()))
            })?,
    };
    let errors = corruption_bound(rho_clean, size);
    let needed = required_sample_size(d, m, errors).map_err(DecodeError::from)?;
    if size < needed {
        return Err(FitError::InsufficientData(format!(
            "|S'| = {size} is below t' + C(d+t'+m, m) = {needed}"
        )));
    }
    let subset = select_subset(data, axis, size, cfg.selection)?;
    Enumeration {
        data,
        alphabet,
        rho_clean,
        degree: d,
        subset,
        errors,
        axis,
        budget: cfg.budget,
    }
    .run()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{parse_poly, rat, Rational};

    fn pts(raw: &[(i64, i64, i64)]) -> Vec<(Vec<Rational>, Rational)> {
        raw.iter()
            .map(|&(x, y, z)| (vec![rat(x, 1), rat(y, 1)], rat(z, 1)))
            .collect()
    }

    #[test]
    fn sample_counts() {
        assert_eq!(required_sample_size(1, 2, 1).unwrap(), 7);
        assert_eq!(required_sample_size(1, 2, 2).unwrap(), 12);
        assert_eq!(required_sample_size(0, 1, 0).unwrap(), 1);
        assert!(required_sample_size(u32::MAX, 60, usize::MAX / 2).is_err());
    }

    #[test]
    fn xy_without_errors() {
        let raw = [(1, 2), (2, 5), (3, -1), (4, 3), (5, 7), (7, -2)];
        let p = pts(&raw.map(|(x, y)| (x, y, x * y)));
        let res = mv_wb_decode(&MvProblem::new(p, 2, 0).unwrap()).unwrap();
        assert_eq!(res.poly, parse_poly("x*y", 2).unwrap());
        assert_eq!(res.error_locator, MultiPoly::one(2, &()));
        for (x, y) in [(11, 13), (-3, 8)] {
            assert_eq!(res.poly.eval(&[rat(x, 1), rat(y, 1)]).unwrap(), rat(x * y, 1));
        }
    }

    #[test]
    fn duplicate_axis_suggests_another() {
        let raw = [(1, 1, 2), (1, 2, 3), (2, 3, 5), (3, 4, 7), (4, 5, 9), (5, 6, 11), (6, 7, 13)];
        let err = MvProblem::new(pts(&raw), 1, 1).unwrap_err();
        let DecodeError::InvalidProblem(msg) = err else { panic!() };
        assert!(msg.contains("x2 has the most distinct"), "{msg}");
        assert!(MvProblem::with_axis(pts(&raw), 1, 1, 1).is_ok());
    }

    #[test]
    fn decode_along_second_axis() {
        // Points in general position for the degree-2 system, first coordinate repeated.
        let raw = [(1, 1, 2), (1, 2, 3), (2, 4, 6), (3, 3, 6), (4, 5, 0), (0, 6, 6), (6, 7, 13)];
        let res = mv_wb_decode(&MvProblem::with_axis(pts(&raw), 1, 1, 1).unwrap()).unwrap();
        assert_eq!(res.poly, parse_poly("x + y", 2).unwrap());
        assert_eq!(res.flagged, vec![4]);
        assert_eq!(res.error_locator, parse_poly("y - 5", 2).unwrap());
    }

    #[test]
    fn empty_alphabet_rejected() {
        assert!(matches!(
            NoiseAlphabet::<Rational>::new(vec![], rat(1, 1)),
            Err(FitError::InvalidInput(_))
        ));
    }
}
