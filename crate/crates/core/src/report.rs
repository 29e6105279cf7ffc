//! Fitted models in their wire form and the report written for every fit.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::algebra::{AnyPoly, PolyJson};
use crate::lpfit::{LpError, ScaledCheb, ScaledChebJson};

/// A fitted model: an exact or float polynomial, or a Chebyshev model with
/// its coordinate maps.
#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    Poly(AnyPoly),
    Cheb(ScaledCheb),
}

/// Either wire form; told apart by `"terms"` versus `"coeffs"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelJson {
    Poly(PolyJson),
    Cheb(ScaledChebJson),
}

impl Model {
    pub fn vars(&self) -> usize {
        match self {
            Model::Poly(p) => p.vars(),
            Model::Cheb(c) => c.vars(),
        }
    }

    /// Value at a float point; residues of GF(q) polynomials are read as
    /// integers.
    pub fn eval_f64(&self, x: &[f64]) -> f64 {
        match self {
            Model::Poly(AnyPoly::Rational(p)) => p.eval_f64(x),
            Model::Poly(AnyPoly::Gf(p)) => p.eval_f64(x),
            Model::Poly(AnyPoly::Float(p)) => p.eval_f64(x),
            Model::Cheb(c) => c.eval(x),
        }
    }

    pub fn to_json(&self) -> ModelJson {
        match self {
            Model::Poly(p) => ModelJson::Poly(p.to_json()),
            Model::Cheb(c) => ModelJson::Cheb(c.to_json()),
        }
    }

    pub fn from_json(j: &ModelJson) -> Result<Self, String> {
        match j {
            ModelJson::Poly(p) => AnyPoly::from_json(p).map(Model::Poly).map_err(|e| e.to_string()),
            ModelJson::Cheb(c) => ScaledCheb::from_json(c)
                .map(Model::Cheb)
                .map_err(|e: LpError| e.to_string()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Failure {
    /// Variant name, e.g. `"Exhausted"` or `"NotDivisible"`.
    pub kind: String,
    pub message: String,
}

/// `|z - p(x)|` over the unfiltered input.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub n: usize,
    pub max_abs: f64,
    pub mean_abs: f64,
    /// Rows with the residual inside the noise band.
    pub within: usize,
    pub fraction_within: f64,
}

impl Residuals {
    pub fn from_rows(rows: impl IntoIterator<Item = (f64, bool)>) -> Self {
        let mut n = 0;
        let mut max_abs = 0.0f64;
        let mut sum = 0.0;
        let mut within = 0;
        for (r, ok) in rows {
            n += 1;
            max_abs = max_abs.max(r.abs());
            sum += r.abs();
            within += ok as usize;
        }
        Residuals {
            n,
            max_abs,
            mean_abs: if n == 0 { 0.0 } else { sum / n as f64 },
            within,
            fraction_within: if n == 0 { 0.0 } else { within as f64 / n as f64 },
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Counters {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wb_calls: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lp_rows: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pivots: Option<usize>,
    /// Rows surviving the Byzantine filter.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filtered: Option<usize>,
}

/// Outcome of one fit, with the exact configuration that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub command: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<Failure>,
    /// Polynomial result of the exact decoders.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly: Option<PolyJson>,
    /// Chebyshev result of the LP path.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<ScaledChebJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub locator: Option<PolyJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<PolyJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degree: Option<u32>,
    /// Original row indices judged corrupt.
    #[serde(default)]
    pub flagged: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_vector: Option<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_achieved: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_clean: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residuals: Option<Residuals>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sup_vs_truth: Option<f64>,
    #[serde(flatten)]
    pub counters: Counters,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub audits: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extra: Option<Value>,
    #[serde(default)]
    pub warnings: Vec<String>,
    pub elapsed_ms: f64,
    pub config: Value,
}

impl FitReport {
    pub fn new(command: &str, config: Value) -> Self {
        FitReport {
            command: command.into(),
            status: Status::Ok,
            failure: None,
            poly: None,
            model: None,
            locator: None,
            q: None,
            degree: None,
            flagged: Vec::new(),
            noise_vector: None,
            delta: None,
            delta_achieved: None,
            rho_clean: None,
            residuals: None,
            sup_vs_truth: None,
            counters: Counters::default(),
            audits: None,
            extra: None,
            warnings: Vec::new(),
            elapsed_ms: 0.0,
            config,
        }
    }

    pub fn fail(mut self, kind: &str, message: String) -> Self {
        self.status = Status::Fail;
        self.failure = Some(Failure {
            kind: kind.into(),
            message,
        });
        self
    }

    /// The fitted model, whichever field holds it.
    pub fn fitted(&self) -> Option<ModelJson> {
        self.poly
            .clone()
            .map(ModelJson::Poly)
            .or_else(|| self.model.clone().map(ModelJson::Cheb))
    }
}
