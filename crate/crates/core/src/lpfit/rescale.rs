//! Affine maps of every axis (and the value) onto `[-1, 1]`.

use serde::{Deserialize, Serialize};

use crate::aggregate::DataSet;
use crate::algebra::{cheb_to_monomial, MultiPoly};

use super::model::{ChebJson, ChebModel};
use super::LpError;

/// `x' = scale * x + offset`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisMap {
    pub scale: f64,
    pub offset: f64,
    /// The axis had zero range and was shifted to 0.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub degenerate: bool,
}

impl AxisMap {
    pub const IDENTITY: AxisMap = AxisMap {
        scale: 1.0,
        offset: 0.0,
        degenerate: false,
    };

    /// Identity when `[lo, hi]` already sits inside `[-1, 1]`, otherwise the
    /// map sending `lo -> -1`, `hi -> 1`.
    pub fn fit(lo: f64, hi: f64) -> AxisMap {
        if lo >= -1.0 && hi <= 1.0 {
            AxisMap::IDENTITY
        } else {
            AxisMap::onto(lo, hi)
        }
    }

    /// Always `lo -> -1`, `hi -> 1`, even when `[lo, hi]` is already inside.
    pub fn onto(lo: f64, hi: f64) -> AxisMap {
        if hi == lo {
            return AxisMap {
                scale: 1.0,
                offset: -lo,
                degenerate: true,
            };
        }
        let scale = 2.0 / (hi - lo);
        AxisMap {
            scale,
            offset: -1.0 - lo * scale,
            degenerate: false,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.scale == 1.0 && self.offset == 0.0
    }

    pub fn apply(&self, x: f64) -> f64 {
        (self.scale * x + self.offset).clamp(-1.0, 1.0)
    }

    pub fn apply_unclamped(&self, x: f64) -> f64 {
        self.scale * x + self.offset
    }

    pub fn invert(&self, y: f64) -> f64 {
        (y - self.offset) / self.scale
    }
}

#[derive(Clone, Debug)]
pub struct Rescaled {
    pub data: DataSet<f64>,
    pub axes: Vec<AxisMap>,
    pub value: AxisMap,
    pub warnings: Vec<String>,
}

/// Maps every coordinate and the values into `[-1, 1]`.
pub fn rescale(data: &DataSet<f64>) -> Result<Rescaled, LpError> {
    if data.is_empty() {
        return Err(LpError::Empty);
    }
    let range = |f: &dyn Fn(usize) -> f64| -> Result<(f64, f64), LpError> {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..data.len() {
            let v = f(i);
            if !v.is_finite() {
                return Err(LpError::InvalidConfig(format!("row {i} holds a non-finite value")));
            }
            lo = lo.min(v);
            hi = hi.max(v);
        }
        Ok((lo, hi))
    };
    let mut warnings = Vec::new();
    let mut axes = Vec::with_capacity(data.dim());
    for a in 0..data.dim() {
        let (lo, hi) = range(&|i| data.point(i)[a])?;
        let m = AxisMap::fit(lo, hi);
        if m.degenerate {
            warnings.push(format!("x{} is constant ({lo}); mapped to 0", a + 1));
        }
        axes.push(m);
    }
    let (lo, hi) = range(&|i| *data.value(i))?;
    let value = AxisMap::fit(lo, hi);
    if value.degenerate {
        warnings.push(format!("z is constant ({lo}); mapped to 0"));
    }
    Ok(Rescaled {
        data: apply_maps(data, &axes, &value)?,
        axes,
        value,
        warnings,
    })
}

/// Applies given maps (clamped to `[-1, 1]`), keeping indices, labels and
/// provenance.
pub fn apply_maps(data: &DataSet<f64>, axes: &[AxisMap], value: &AxisMap) -> Result<DataSet<f64>, LpError> {
    if axes.len() != data.dim() {
        return Err(LpError::InvalidConfig(format!(
            "{} axis maps for {}-variable data",
            axes.len(),
            data.dim()
        )));
    }
    let points = data
        .points()
        .iter()
        .map(|p| p.iter().zip(axes).map(|(&c, m)| m.apply(c)).collect())
        .collect();
    let values = data.values().iter().map(|&z| value.apply(z)).collect();
    DataSet::new((), data.dim(), points, values)
        .map(|d| carry_metadata(d, data))
        .map_err(|e| LpError::Malformed(e.to_string()))
}

fn carry_metadata(mut d: DataSet<f64>, from: &DataSet<f64>) -> DataSet<f64> {
    d.set_indices(from.indices().to_vec());
    if let Some(l) = from.labels() {
        d = d.with_labels(l.to_vec()).expect("same length");
    }
    d.truth = from.truth.clone();
    d.seed = from.seed;
    d
}

/// A Chebyshev model fitted on rescaled data, with the maps that take
/// original coordinates to the model's and the model's value back.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledCheb {
    pub model: ChebModel<f64>,
    pub axes: Vec<AxisMap>,
    pub value: AxisMap,
}

impl ScaledCheb {
    pub fn unscaled(model: ChebModel<f64>) -> Self {
        let k = model.vars();
        ScaledCheb {
            model,
            axes: vec![AxisMap::IDENTITY; k],
            value: AxisMap::IDENTITY,
        }
    }

    pub fn vars(&self) -> usize {
        self.model.vars()
    }

    /// Noise half-width in original value units.
    pub fn delta(&self) -> f64 {
        self.model.delta_achieved / self.value.scale
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let y: Vec<f64> = x.iter().zip(&self.axes).map(|(&c, m)| m.apply_unclamped(c)).collect();
        self.value.invert(self.model.eval(&y))
    }

    /// Monomial form in original coordinates.
    pub fn to_monomial(&self) -> MultiPoly<f64> {
        let p = cheb_to_monomial(&self.model);
        let k = self.vars();
        let subs: Vec<MultiPoly<f64>> = self
            .axes
            .iter()
            .enumerate()
            .map(|(a, m)| {
                MultiPoly::var(a, k, &())
                    .scale(&m.scale)
                    .add(&MultiPoly::constant(m.offset, k))
                    .expect("same arity")
            })
            .collect();
        let mut out = MultiPoly::zero(k, &());
        for (mono, c) in p.terms() {
            let mut term = MultiPoly::constant(*c, k);
            for (a, &e) in mono.exps().iter().enumerate() {
                for _ in 0..e {
                    term = term.mul(&subs[a]).expect("same arity");
                }
            }
            out = out.add(&term).expect("same arity");
        }
        out.add(&MultiPoly::constant(-self.value.offset, k))
            .expect("same arity")
            .scale(&(1.0 / self.value.scale))
    }

    pub fn to_json(&self) -> ScaledChebJson {
        let all_identity = self.axes.iter().all(AxisMap::is_identity) && self.value.is_identity();
        ScaledChebJson {
            cheb: self.model.to_json(),
            axes: if all_identity { None } else { Some(self.axes.clone()) },
            value: if all_identity { None } else { Some(self.value) },
        }
    }

    pub fn from_json(j: &ScaledChebJson) -> Result<Self, LpError> {
        let model = ChebModel::from_json(&j.cheb)?;
        let axes = j.axes.clone().unwrap_or_else(|| vec![AxisMap::IDENTITY; model.vars()]);
        if axes.len() != model.vars() {
            return Err(LpError::Malformed(format!(
                "{} axis maps for {} variables",
                axes.len(),
                model.vars()
            )));
        }
        Ok(ScaledCheb {
            model,
            axes,
            value: j.value.unwrap_or(AxisMap::IDENTITY),
        })
    }
}

/// [`ChebJson`] plus optional `"axes"` and `"value"` maps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledChebJson {
    #[serde(flatten)]
    pub cheb: ChebJson,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axes: Option<Vec<AxisMap>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<AxisMap>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_formula() {
        let m = AxisMap::fit(0.0, 10.0);
        assert_eq!(m.apply(0.0), -1.0);
        assert_eq!(m.apply(10.0), 1.0);
        for x in [1.0, 2.5, 7.0] {
            assert!((m.apply(x) - (x / 5.0 - 1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn scaled_data_is_left_alone() {
        let data = DataSet::new((), 2, vec![vec![-0.5, 0.25], vec![0.75, -1.0]], vec![0.1, -0.9]).unwrap();
        let r = rescale(&data).unwrap();
        assert!(r.axes.iter().all(AxisMap::is_identity) && r.value.is_identity());
        assert_eq!(r.data, data);
        assert!(r.warnings.is_empty());
        let again = rescale(&r.data).unwrap();
        assert_eq!(again.data, r.data);
    }

    #[test]
    fn constant_axis_warns() {
        let data = DataSet::new((), 2, vec![vec![3.0, 0.0], vec![3.0, 5.0]], vec![0.0, 1.0]).unwrap();
        let r = rescale(&data).unwrap();
        assert!(r.axes[0].degenerate);
        assert_eq!(r.data.point(0)[0], 0.0);
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn monomial_form_in_original_units() {
        let mut model = ChebModel::<f64>::zeros(vec![2, 1]);
        model.set(&[2, 0], 0.5);
        model.set(&[1, 1], -0.25);
        model.set(&[0, 0], 0.1);
        let s = ScaledCheb {
            model,
            axes: vec![AxisMap::fit(0.0, 10.0), AxisMap::fit(-4.0, 2.0)],
            value: AxisMap::fit(-3.0, 7.0),
        };
        let p = s.to_monomial();
        for x in [[0.0, -4.0], [3.3, 1.0], [10.0, 2.0], [6.1, -0.7]] {
            assert!((p.eval_f64(&x) - s.eval(&x)).abs() < 1e-12);
        }
        let j = serde_json::to_string(&s.to_json()).unwrap();
        let back: ScaledChebJson = serde_json::from_str(&j).unwrap();
        assert_eq!(ScaledCheb::from_json(&back).unwrap(), s);
    }
}
