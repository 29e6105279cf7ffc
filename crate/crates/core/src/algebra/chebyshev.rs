//! Chebyshev polynomials of the first kind and conversion to the monomial basis.

use num_traits::Float;

use super::poly::MultiPoly;
use super::AlgebraError;
use crate::lpfit::{ChebModel, Real};

const CLAMP_BAND: f64 = 1e-12;

/// `T_i(x)` via `T_0 = 1`, `T_1 = x`, `T_{n+1} = 2x T_n - T_{n-1}`.
///
/// Inputs within `1e-12` of `[-1, 1]` are clamped; anything further out is
/// rejected.
pub fn chebyshev_eval<T: Float>(i: usize, x: T) -> Result<T, AlgebraError> {
    let band = T::from(CLAMP_BAND).unwrap();
    let one = T::one();
    if !(x.abs() <= one + band) {
        return Err(AlgebraError::OutOfDomain(x.to_f64().unwrap_or(f64::NAN)));
    }
    let x = x.max(-one).min(one);
    Ok(chebyshev_unchecked(i, x))
}

pub(crate) fn chebyshev_unchecked<T: Float>(i: usize, x: T) -> T {
    match i {
        0 => T::one(),
        1 => x,
        _ => {
            let two_x = x + x;
            let (mut prev, mut cur) = (T::one(), x);
            for _ in 1..i {
                let next = two_x * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}

/// `T_0(x) .. T_n(x)` in one pass.
pub(crate) fn chebyshev_all<T: Float>(n: usize, x: T, out: &mut Vec<T>) {
    out.clear();
    out.push(T::one());
    if n >= 1 {
        out.push(x);
    }
    let two_x = x + x;
    for k in 2..=n {
        let next = two_x * out[k - 1] - out[k - 2];
        out.push(next);
    }
}

/// Ascending monomial coefficients of `T_i`. Exact while they fit in `f64`'s
/// 53-bit mantissa (`i <= 50` or so).
pub fn chebyshev_monomial_coeffs(i: usize) -> Vec<f64> {
    let mut prev = vec![1.0];
    if i == 0 {
        return prev;
    }
    let mut cur = vec![0.0, 1.0];
    for _ in 1..i {
        let mut next = vec![0.0; cur.len() + 1];
        for (k, c) in cur.iter().enumerate() {
            next[k + 1] += 2.0 * c;
        }
        for (k, c) in prev.iter().enumerate() {
            next[k] -= c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// Expands a tensor Chebyshev model into the monomial basis.
pub fn cheb_to_monomial<T: Real>(model: &ChebModel<T>) -> MultiPoly<f64> {
    let vars = model.vars();
    let tables: Vec<Vec<Vec<f64>>> = model
        .degrees()
        .iter()
        .map(|&n| (0..=n).map(chebyshev_monomial_coeffs).collect())
        .collect();
    let mut terms: Vec<(Vec<u32>, f64)> = Vec::new();
    for (index, c) in model.indexed_coeffs() {
        let c = c.to_f64().unwrap_or(f64::NAN);
        if c == 0.0 {
            continue;
        }
        // Cartesian product of the per-axis monomial expansions.
        let mut partial: Vec<(Vec<u32>, f64)> = vec![(Vec::with_capacity(vars), c)];
        for (axis, &i) in index.iter().enumerate() {
            let mut next = Vec::new();
            for (exps, coeff) in &partial {
                for (e, &a) in tables[axis][i].iter().enumerate() {
                    if a != 0.0 {
                        let mut ex = exps.clone();
                        ex.push(e as u32);
                        next.push((ex, coeff * a));
                    }
                }
            }
            partial = next;
        }
        terms.extend(partial);
    }
    MultiPoly::from_terms(vars, &(), terms).expect("exponent vectors have model arity")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluation_examples() {
        assert_eq!(chebyshev_eval(0, 0.37).unwrap(), 1.0);
        assert_eq!(chebyshev_eval(1, -0.5).unwrap(), -0.5);
        // 2x^2 - 1 at 0.5
        let direct = 2.0 * 0.5f64 * 0.5 - 1.0;
        assert_eq!(chebyshev_eval(2, 0.5).unwrap(), direct);
        assert_eq!(chebyshev_eval(3, 1.0 + 1e-13).unwrap(), 1.0);
        assert!(chebyshev_eval(2, 1.001).is_err());
        assert!(chebyshev_eval(2, f64::NAN).is_err());
        assert!((chebyshev_eval(2, 0.5f32).unwrap() + 0.5).abs() < 1e-6);
    }

    #[test]
    fn cosine_identity() {
        for i in 0..=20 {
            for k in 0..=200 {
                let theta = std::f64::consts::PI * k as f64 / 200.0;
                let t = chebyshev_eval(i, theta.cos()).unwrap();
                assert!((t - (i as f64 * theta).cos()).abs() < 1e-9, "i={i} theta={theta}");
                assert!(t.abs() <= 1.0 + 1e-9);
            }
        }
    }

    #[test]
    fn monomial_coefficients() {
        assert_eq!(chebyshev_monomial_coeffs(2), vec![-1.0, 0.0, 2.0]);
        assert_eq!(chebyshev_monomial_coeffs(4), vec![1.0, 0.0, -8.0, 0.0, 8.0]);
    }

    #[test]
    fn conversion_examples() {
        let mut m = ChebModel::<f64>::zeros(vec![2, 2]);
        m.set(&[0, 0], 1.0);
        assert_eq!(cheb_to_monomial(&m), MultiPoly::constant(1.0, 2));

        let mut m = ChebModel::<f64>::zeros(vec![2, 2]);
        m.set(&[1, 0], 1.0);
        assert_eq!(cheb_to_monomial(&m), MultiPoly::var(0, 2, &()));

        let mut m = ChebModel::<f64>::zeros(vec![2, 2]);
        m.set(&[2, 0], 1.0);
        let expect = MultiPoly::from_terms(2, &(), [(vec![2, 0], 2.0), (vec![0, 0], -1.0)]).unwrap();
        assert_eq!(cheb_to_monomial(&m), expect);
    }

    #[test]
    fn conversion_is_pointwise_equal() {
        let degrees = vec![3, 4];
        let coeffs: Vec<f64> = (0..20).map(|k| ((k * 37 % 11) as f64 - 5.0) / 7.0).collect();
        let m = ChebModel::from_coeffs(degrees, coeffs, 0.0).unwrap();
        let p = cheb_to_monomial(&m);
        for a in 0..=20 {
            for b in 0..=20 {
                let pt = [-1.0 + a as f64 * 0.1, -1.0 + b as f64 * 0.1];
                assert!((p.eval_f64(&pt) - m.eval(&pt)).abs() < 1e-9);
            }
        }
    }
}
