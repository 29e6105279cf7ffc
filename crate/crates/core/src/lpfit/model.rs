//! Tensor-product Chebyshev models.

use std::fmt::Debug;

use num_traits::{Float, FromPrimitive};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::chebyshev::chebyshev_all;
use crate::algebra::Field;

use super::LpError;

/// Float scalar accepted by the LP path.
pub trait Real: Float + FromPrimitive + Debug + Send + Sync + 'static {}
impl<T: Float + FromPrimitive + Debug + Send + Sync + 'static> Real for T {}

/// A [`Real`] that can also sit in a [`DataSet`](crate::aggregate::DataSet).
pub trait LpScalar: Real + Field<Ctx = ()> {}
impl<T: Real + Field<Ctx = ()>> LpScalar for T {}

/// `p(x) = sum c_{i1..ik} T_{i1}(x1) ... T_{ik}(xk)`, coefficients stored
/// densely with the last axis varying fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct ChebModel<T> {
    degrees: Vec<usize>,
    coeffs: Vec<T>,
    pub delta_achieved: T,
}

impl<T: Real> ChebModel<T> {
    pub fn zeros(degrees: Vec<usize>) -> Self {
        let n = degrees.iter().map(|d| d + 1).product();
        ChebModel {
            degrees,
            coeffs: vec![T::zero(); n],
            delta_achieved: T::zero(),
        }
    }

    pub fn from_coeffs(degrees: Vec<usize>, coeffs: Vec<T>, delta: T) -> Result<Self, LpError> {
        let n: usize = degrees.iter().map(|d| d + 1).product();
        if degrees.is_empty() || coeffs.len() != n {
            return Err(LpError::Malformed(format!(
                "{} coefficients for degrees {:?}",
                coeffs.len(),
                degrees
            )));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(LpError::Malformed("non-finite coefficient".into()));
        }
        Ok(ChebModel {
            degrees,
            coeffs,
            delta_achieved: delta,
        })
    }

    pub fn vars(&self) -> usize {
        self.degrees.len()
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    /// Sum of per-axis degrees.
    pub fn total_degree(&self) -> usize {
        self.degrees.iter().sum()
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    fn flat(&self, index: &[usize]) -> usize {
        assert_eq!(index.len(), self.degrees.len());
        index
            .iter()
            .zip(&self.degrees)
            .fold(0, |acc, (&i, &d)| {
                assert!(i <= d, "index {i} exceeds degree {d}");
                acc * (d + 1) + i
            })
    }

    pub fn coeff(&self, index: &[usize]) -> T {
        self.coeffs[self.flat(index)]
    }

    pub fn set(&mut self, index: &[usize], v: T) {
        let k = self.flat(index);
        self.coeffs[k] = v;
    }

    /// `(multi-index, coefficient)` pairs in storage order.
    pub fn indexed_coeffs(&self) -> impl Iterator<Item = (Vec<usize>, T)> + '_ {
        let degrees = self.degrees.clone();
        self.coeffs.iter().enumerate().map(move |(mut k, &c)| {
            let mut idx = vec![0; degrees.len()];
            for a in (0..degrees.len()).rev() {
                idx[a] = k % (degrees[a] + 1);
                k /= degrees[a] + 1;
            }
            (idx, c)
        })
    }

    /// Values of every tensor basis function at `point`, in storage order.
    pub fn basis_row(degrees: &[usize], point: &[T]) -> Vec<T> {
        let mut per_axis: Vec<Vec<T>> = Vec::with_capacity(degrees.len());
        for (&n, &x) in degrees.iter().zip(point) {
            let mut v = Vec::with_capacity(n + 1);
            chebyshev_all(n, x, &mut v);
            per_axis.push(v);
        }
        let mut row = vec![T::one()];
        for axis in per_axis {
            let mut next = Vec::with_capacity(row.len() * axis.len());
            for &r in &row {
                for &t in &axis {
                    next.push(r * t);
                }
            }
            row = next;
        }
        row
    }

    pub fn eval(&self, point: &[T]) -> T {
        assert_eq!(point.len(), self.vars());
        Self::basis_row(&self.degrees, point)
            .iter()
            .zip(&self.coeffs)
            .fold(T::zero(), |acc, (&b, &c)| acc + b * c)
    }

    /// Exact partial derivative along `axis`, still in the Chebyshev basis.
    pub fn derivative(&self, axis: usize) -> Self {
        let n = self.degrees[axis];
        let mut out = ChebModel::zeros(self.degrees.clone());
        let stride: usize = self.degrees[axis + 1..].iter().map(|d| d + 1).product();
        let block = stride * (n + 1);
        let two = T::from_f64(2.0).unwrap();
        for base in (0..self.coeffs.len()).step_by(block) {
            for off in 0..stride {
                let at = |k: usize| base + k * stride + off;
                // b_{k-1} = b_{k+1} + 2k c_k, derivative coefficients b_0/2, b_1, ...
                let mut b = vec![T::zero(); n + 2];
                for k in (1..=n).rev() {
                    b[k - 1] = b[k + 1] + two * T::from_usize(k).unwrap() * self.coeffs[at(k)];
                }
                if n >= 1 {
                    out.coeffs[at(0)] = b[0] / two;
                    for k in 1..n {
                        out.coeffs[at(k)] = b[k];
                    }
                }
            }
        }
        out
    }

    pub fn max_abs_coeff(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.abs()))
    }

    pub fn cast<U: Real>(&self) -> ChebModel<U> {
        ChebModel {
            degrees: self.degrees.clone(),
            coeffs: self.coeffs.iter().map(|c| U::from(*c).unwrap()).collect(),
            delta_achieved: U::from(self.delta_achieved).unwrap(),
        }
    }

    pub fn to_json(&self) -> ChebJson {
        ChebJson {
            basis: "chebyshev".into(),
            degrees: self.degrees.clone(),
            coeffs: nest(
                &self.degrees,
                &self.coeffs.iter().map(|c| c.to_f64().unwrap()).collect::<Vec<_>>(),
            ),
            delta: self.delta_achieved.to_f64().unwrap(),
        }
    }

    pub fn from_json(j: &ChebJson) -> Result<Self, LpError> {
        if j.basis != "chebyshev" {
            return Err(LpError::Malformed(format!("basis {:?}", j.basis)));
        }
        let mut flat = Vec::new();
        flatten(&j.coeffs, j.degrees.len(), &mut flat)?;
        let coeffs = flat.into_iter().map(|c| T::from_f64(c).unwrap()).collect();
        Self::from_coeffs(j.degrees.clone(), coeffs, T::from_f64(j.delta).unwrap())
    }
}

/// Wire form: `{"basis":"chebyshev","degrees":[n,m],"coeffs":[[..]],"delta":..}`.
/// Coefficients nest one array level per variable.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChebJson {
    pub basis: String,
    pub degrees: Vec<usize>,
    pub coeffs: Value,
    pub delta: f64,
}

fn nest(degrees: &[usize], flat: &[f64]) -> Value {
    match degrees {
        [] => Value::Null,
        [_] => Value::Array(flat.iter().map(|&c| serde_json::json!(c)).collect()),
        [n, rest @ ..] => {
            let chunk = flat.len() / (n + 1);
            Value::Array(flat.chunks(chunk).map(|c| nest(rest, c)).collect())
        }
    }
}

fn flatten(v: &Value, depth: usize, out: &mut Vec<f64>) -> Result<(), LpError> {
    let arr = v
        .as_array()
        .ok_or_else(|| LpError::Malformed("coefficient grid must be nested arrays".into()))?;
    for item in arr {
        if depth == 1 {
            out.push(
                item.as_f64()
                    .ok_or_else(|| LpError::Malformed(format!("coefficient {item}")))?,
            );
        } else {
            flatten(item, depth - 1, out)?;
        }
    }
    Ok(())
}
