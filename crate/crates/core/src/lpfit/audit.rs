//! Post-fit audits: sup-norm growth between grid nodes and derivative size
//! relative to the Markov bound.

use serde::{Deserialize, Serialize};

use crate::algebra::sup_norm_on_box;

use super::model::ChebModel;

/// Nodes per axis used by the audits unless told otherwise.
pub const AUDIT_GRID: usize = 101;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DerivativeAudit {
    pub sup_p: f64,
    /// `sup |dp/dx_a|` for each axis.
    pub sup_partials: Vec<f64>,
    /// `(total degree)^2`.
    pub markov_scale: f64,
    /// `max_a sup|dp/dx_a| / (markov_scale * sup|p|)`; 0 when the
    /// derivatives vanish.
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundednessAudit {
    pub sup_p: f64,
    /// Per-axis node count of the LP grid.
    pub grid_per_axis: usize,
    /// Per-axis node count actually audited.
    pub audit_per_axis: usize,
    /// `sum_{a != b} n_a^3 n_b`, or `n^3` with one variable.
    pub term: f64,
    /// `max(sup|p| - 1, 0)`.
    pub excess: f64,
    /// Smallest `K` with `sup|p| <= 1 + K * term / grid_per_axis`.
    pub implied_k: f64,
}

impl BoundednessAudit {
    pub fn passes(&self, k: f64) -> bool {
        self.sup_p <= 1.0 + k * self.term / self.grid_per_axis as f64 + 1e-12
    }
}

fn unit_box(vars: usize) -> Vec<(f64, f64)> {
    vec![(-1.0, 1.0); vars]
}

/// Sup of `|p|` and of every partial on a `per_axis`-node tensor grid of
/// `[-1, 1]^k` (endpoints included). The partials come from exact
/// differentiation of the Chebyshev series.
pub fn derivative_bound_audit(model: &ChebModel<f64>, per_axis: usize) -> DerivativeAudit {
    let k = model.vars();
    let bounds = unit_box(k);
    let sup_p = sup_norm_on_box(|x| model.eval(x), &bounds, per_axis);
    let sup_partials: Vec<f64> = (0..k)
        .map(|a| {
            let d = model.derivative(a);
            sup_norm_on_box(|x| d.eval(x), &bounds, per_axis)
        })
        .collect();
    let deg = model.total_degree() as f64;
    let markov_scale = deg * deg;
    let top = sup_partials.iter().fold(0.0f64, |m, &s| m.max(s));
    let ratio = if top == 0.0 { 0.0 } else { top / (markov_scale * sup_p) };
    DerivativeAudit {
        sup_p,
        sup_partials,
        markov_scale,
        ratio,
    }
}

/// `sum_{a != b} n_a^3 n_b`; `n^3` for a single variable.
pub fn boundedness_term(degrees: &[usize]) -> f64 {
    if let [n] = degrees {
        return (*n as f64).powi(3);
    }
    let mut s = 0.0;
    for (a, &na) in degrees.iter().enumerate() {
        for (b, &nb) in degrees.iter().enumerate() {
            if a != b {
                s += (na as f64).powi(3) * nb as f64;
            }
        }
    }
    s
}

/// Sup of `|p|` on a grid `refine` times finer than the LP grid of
/// `grid_per_axis` nodes, compared with `1 + K * term / grid_per_axis`.
pub fn boundedness_audit(model: &ChebModel<f64>, grid_per_axis: usize, refine: usize) -> BoundednessAudit {
    let g = grid_per_axis.max(2);
    let audit_per_axis = (g - 1) * refine.max(1) + 1;
    let sup_p = sup_norm_on_box(|x| model.eval(x), &unit_box(model.vars()), audit_per_axis);
    let term = boundedness_term(model.degrees());
    let excess = (sup_p - 1.0).max(0.0);
    let implied_k = if excess == 0.0 {
        0.0
    } else if term == 0.0 {
        f64::INFINITY
    } else {
        excess * g as f64 / term
    };
    BoundednessAudit {
        sup_p,
        grid_per_axis: g,
        audit_per_axis,
        term,
        excess,
        implied_k,
    }
}

/// `sup |a - b|` over a `per_axis`-node grid of `[-1, 1]^vars`.
pub fn sup_distance(
    a: impl Fn(&[f64]) -> f64,
    b: impl Fn(&[f64]) -> f64,
    vars: usize,
    per_axis: usize,
) -> f64 {
    sup_norm_on_box(|x| a(x) - b(x), &unit_box(vars), per_axis)
}
