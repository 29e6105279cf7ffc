//! Per-cell fits and their pairwise merge up the bisection tree.
//!
//! A merge node draws `M` Halton points in each child's cell, evaluates the
//! child model there and refits on the union with the same fitter. The sup
//! distance between each child and its parent, on the child's cell, is
//! recorded as that level's drift.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{AnyPoly, Field, MultiPoly, Rational};
use crate::lpfit::{apply_maps, build_lp, byzantine_filter, solve_lp, AxisMap, FilterConfig, ScaledCheb};
use crate::mvwb::{mv_noise_enumerate_fit, mv_wb_decode, required_sample_size, MvProblem};
use crate::report::Model;
use crate::wb::{noise_enumerate_fit, wb_decode, EnumerationConfig, NoiseAlphabet, WbProblem};

use super::halton::halton_exact;
use super::{AnyDataSet, Cell, DataSet, Partition, PipelineError};

pub type LocalModel = Model;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpFitter {
    /// Per-axis Chebyshev degrees.
    pub degrees: Vec<usize>,
    pub grid_per_axis: usize,
    /// Run the Byzantine filter on each cell first (leaf fits only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub filter: Option<FilterConfig>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WbFitter {
    pub degree: u32,
    pub rho_clean: f64,
    /// Integer noise offsets; `[0]` for exact data.
    pub alphabet: Vec<i64>,
    pub budget: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FitterConfig {
    Lp(LpFitter),
    Wb(WbFitter),
}

impl FitterConfig {
    /// Fewest samples a fit of this shape can be determined from.
    pub fn min_samples(&self, vars: usize) -> usize {
        match self {
            FitterConfig::Lp(f) => f.degrees.iter().map(|d| d + 1).product(),
            FitterConfig::Wb(f) if vars == 1 => f.degree as usize + 1,
            FitterConfig::Wb(f) => required_sample_size(f.degree, vars, 0).unwrap_or(usize::MAX),
        }
    }
}

/// One leaf fit.
#[derive(Clone, Debug, PartialEq)]
pub struct CellFit {
    pub cell: usize,
    pub bounds: Cell,
    pub samples: usize,
    pub model: Result<LocalModel, String>,
    /// Original row indices flagged or filtered out.
    pub rejected: Vec<usize>,
    pub elapsed_ms: f64,
}

/// Fits every cell independently and in parallel. Fails only when no cell
/// succeeds.
pub fn fit_local(data: &AnyDataSet, part: &Partition, fitter: &FitterConfig) -> Result<Vec<CellFit>, PipelineError> {
    let members = part.members();
    let floats = data.to_float();
    let value_map = global_value_map(&floats);
    let fits: Vec<CellFit> = members
        .par_iter()
        .enumerate()
        .map(|(c, rows)| {
            let start = Instant::now();
            let bounds = part.cells[c].clone();
            let (model, rejected) = match fit_cell(data, &floats, rows, &bounds, value_map, fitter) {
                Ok((m, r)) => (Ok(m), r),
                Err(e) => (Err(e), Vec::new()),
            };
            CellFit {
                cell: c,
                bounds,
                samples: rows.len(),
                model,
                rejected,
                elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
            }
        })
        .collect();
    if fits.iter().all(|f| f.model.is_err()) {
        let first = fits
            .first()
            .and_then(|f| f.model.clone().err())
            .unwrap_or_else(|| "no cells".into());
        return Err(PipelineError::AllCellsFailed(first));
    }
    Ok(fits)
}

/// Value map shared by every LP model of one pipeline run.
fn global_value_map(data: &DataSet<f64>) -> AxisMap {
    let (lo, hi) = data
        .values()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    if lo.is_finite() {
        AxisMap::fit(lo, hi)
    } else {
        AxisMap::IDENTITY
    }
}

fn cell_maps(cell: &Cell) -> Vec<AxisMap> {
    cell.lo.iter().zip(&cell.hi).map(|(&l, &h)| AxisMap::onto(l, h)).collect()
}

fn fit_cell(
    data: &AnyDataSet,
    floats: &DataSet<f64>,
    rows: &[usize],
    cell: &Cell,
    value_map: AxisMap,
    fitter: &FitterConfig,
) -> Result<(LocalModel, Vec<usize>), String> {
    let need = fitter.min_samples(data.dim());
    if rows.len() < need {
        return Err(format!("{} samples, fitter needs at least {need}", rows.len()));
    }
    match fitter {
        FitterConfig::Lp(f) => {
            let axes = cell_maps(cell);
            let local = apply_maps(&floats.subset(rows), &axes, &value_map).map_err(|e| e.to_string())?;
            let (kept, rejected) = match &f.filter {
                Some(cfg) => {
                    let out = byzantine_filter(&local, cfg).map_err(|e| e.to_string())?;
                    let kept: std::collections::BTreeSet<usize> = out.data.indices().iter().copied().collect();
                    let rejected = local.indices().iter().copied().filter(|i| !kept.contains(i)).collect();
                    (out.data, rejected)
                }
                None => (local, Vec::new()),
            };
            let model = lp_fit(&kept, f, &axes, value_map)?;
            Ok((Model::Cheb(model), rejected))
        }
        FitterConfig::Wb(f) => {
            let AnyDataSet::Rational(d) = data else {
                return Err("the WB fitter in the pipeline needs rational data".into());
            };
            let local = d.subset(rows);
            let alphabet = NoiseAlphabet::new(
                f.alphabet.iter().map(|&o| Rational::from_i64(o, &())).collect(),
                Rational::from_i64(f.alphabet.iter().map(|o| o.abs()).max().unwrap_or(0), &()),
            )
            .map_err(|e| e.to_string())?;
            let cfg = EnumerationConfig {
                budget: f.budget,
                ..EnumerationConfig::default()
            };
            let fit = if local.dim() == 1 {
                noise_enumerate_fit(&local, f.rho_clean, f.degree, &alphabet, &cfg)
            } else {
                mv_noise_enumerate_fit(&local, f.rho_clean, f.degree, &alphabet, &cfg, 0)
            }
            .map_err(|e| e.to_string())?;
            Ok((Model::Poly(AnyPoly::Rational(fit.poly)), fit.flagged))
        }
    }
}

fn lp_fit(data: &DataSet<f64>, f: &LpFitter, axes: &[AxisMap], value: AxisMap) -> Result<ScaledCheb, String> {
    let inst = build_lp(data, &f.degrees, f.grid_per_axis).map_err(|e| e.to_string())?;
    let sol = solve_lp(&inst).map_err(|e| e.to_string())?;
    Ok(ScaledCheb {
        model: sol.model,
        axes: axes.to_vec(),
        value,
    })
}

/// Binary merge tree over the cells of a [`Partition`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MergePlan {
    pub leaves: usize,
    /// Boxes of all nodes: leaves first, then internal nodes.
    pub boxes: Vec<Cell>,
    /// Children of internal node `leaves + j`, children before parents.
    pub internal: Vec<(usize, usize)>,
    pub resample_per_node: usize,
    pub fitter: FitterConfig,
}

impl MergePlan {
    pub fn from_partition(part: &Partition, resample_per_node: usize, fitter: FitterConfig) -> Self {
        let mut boxes = part.cells.clone();
        boxes.extend(part.splits.iter().map(|s| s.0.clone()));
        MergePlan {
            leaves: part.cells.len(),
            boxes,
            internal: part.splits.iter().map(|s| (s.1, s.2)).collect(),
            resample_per_node,
            fitter,
        }
    }

    pub fn root(&self) -> usize {
        self.boxes.len() - 1
    }

    fn heights(&self) -> Vec<usize> {
        let mut h = vec![0; self.boxes.len()];
        for (j, &(l, r)) in self.internal.iter().enumerate() {
            h[self.leaves + j] = 1 + h[l].max(h[r]);
        }
        h
    }

    fn validate(&self) -> Result<(), PipelineError> {
        let bad = |m: String| Err(PipelineError::InvalidPlan(m));
        if self.leaves == 0 || self.boxes.len() != self.leaves + self.internal.len() {
            return bad("node count does not match leaves + internal nodes".into());
        }
        if self.internal.len() + 1 != self.leaves {
            return bad("a binary tree over n leaves has n - 1 merges".into());
        }
        let mut used = vec![false; self.boxes.len()];
        for (j, &(l, r)) in self.internal.iter().enumerate() {
            let me = self.leaves + j;
            if l >= me || r >= me || l == r || used[l] || used[r] {
                return bad(format!("node {me} has invalid children ({l}, {r})"));
            }
            used[l] = true;
            used[r] = true;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeDrift {
    pub node: usize,
    pub level: usize,
    pub children: (usize, usize),
    /// `sup |child - node|` on each child's box; `None` for a missing child.
    pub drift: (Option<f64>, Option<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct MergeOutcome {
    pub root: LocalModel,
    pub nodes: Vec<NodeDrift>,
    /// Largest drift per level, level 1 first.
    pub level_drift: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Nodes per axis on which drift is measured.
const DRIFT_GRID: usize = 21;

/// Merges leaf models bottom-up. A node with one failed child refits from
/// the other alone; with both failed it fails too.
pub fn merge_hierarchical(locals: &[CellFit], plan: &MergePlan) -> Result<MergeOutcome, PipelineError> {
    plan.validate()?;
    if locals.len() != plan.leaves {
        return Err(PipelineError::InvalidPlan(format!(
            "{} local fits for {} leaves",
            locals.len(),
            plan.leaves
        )));
    }
    let vars = plan.boxes[0].dim();
    let need = plan.fitter.min_samples(vars);
    if !plan.internal.is_empty() && plan.resample_per_node < need {
        return Err(PipelineError::Node {
            node: plan.leaves,
            message: format!(
                "resample count M = {} is below the fitter's minimum of {need}",
                plan.resample_per_node
            ),
        });
    }
    let value_map = locals
        .iter()
        .find_map(|l| match &l.model {
            Ok(Model::Cheb(c)) => Some(c.value),
            _ => None,
        })
        .unwrap_or(AxisMap::IDENTITY);
    let mut models: Vec<Option<LocalModel>> = vec![None; plan.boxes.len()];
    let mut warnings = Vec::new();
    for (c, l) in locals.iter().enumerate() {
        match &l.model {
            Ok(m) => models[c] = Some(m.clone()),
            Err(e) => warnings.push(format!("cell {c} has no model: {e}")),
        }
    }
    let heights = plan.heights();
    let top = heights.iter().copied().max().unwrap_or(0);
    let mut nodes = Vec::new();
    let mut level_drift = Vec::new();
    for level in 1..=top {
        let ids: Vec<usize> = (0..plan.internal.len())
            .map(|j| plan.leaves + j)
            .filter(|&n| heights[n] == level)
            .collect();
        let results: Vec<(usize, Result<Option<(LocalModel, NodeDrift)>, String>)> = ids
            .par_iter()
            .map(|&n| {
                let (l, r) = plan.internal[n - plan.leaves];
                let out = merge_node(n, level, (l, models[l].as_ref()), (r, models[r].as_ref()), plan, value_map);
                (n, out)
            })
            .collect();
        let mut worst = 0.0f64;
        for (n, res) in results {
            match res {
                Ok(Some((m, d))) => {
                    for v in [d.drift.0, d.drift.1].into_iter().flatten() {
                        worst = worst.max(v);
                    }
                    if d.drift.0.is_none() || d.drift.1.is_none() {
                        warnings.push(format!("node {n} merged from one child"));
                    }
                    models[n] = Some(m);
                    nodes.push(d);
                }
                Ok(None) => warnings.push(format!("node {n} has no model: both children failed")),
                Err(message) => return Err(PipelineError::Node { node: n, message }),
            }
        }
        level_drift.push(worst);
    }
    let root = models[plan.root()].take().ok_or_else(|| PipelineError::Node {
        node: plan.root(),
        message: "no model reached the root".into(),
    })?;
    Ok(MergeOutcome {
        root,
        nodes,
        level_drift,
        warnings,
    })
}

fn merge_node(
    node: usize,
    level: usize,
    left: (usize, Option<&LocalModel>),
    right: (usize, Option<&LocalModel>),
    plan: &MergePlan,
    value_map: AxisMap,
) -> Result<Option<(LocalModel, NodeDrift)>, String> {
    let present: Vec<(usize, &LocalModel)> = [left, right]
        .into_iter()
        .filter_map(|(id, m)| m.map(|m| (id, m)))
        .collect();
    if present.is_empty() {
        return Ok(None);
    }
    let merged = merge_models(&present, &plan.boxes[node], plan, value_map)?;
    let drift_of = |(id, m): (usize, Option<&LocalModel>)| {
        m.map(|m| {
            let b = &plan.boxes[id];
            box_sup_distance(m, &merged, b)
        })
    };
    let drift = (drift_of(left), drift_of(right));
    Ok(Some((
        merged,
        NodeDrift {
            node,
            level,
            children: (left.0, right.0),
            drift,
        },
    )))
}

/// Refits from `M` Halton samples per child; child `id` uses Halton indices
/// `id*M + 1 ..= (id+1)*M`, so no two children share points.
pub fn merge_models(
    children: &[(usize, &LocalModel)],
    node_box: &Cell,
    plan: &MergePlan,
    value_map: AxisMap,
) -> Result<LocalModel, String> {
    let m = plan.resample_per_node as u64;
    let k = node_box.dim();
    match &plan.fitter {
        FitterConfig::Lp(f) => {
            let mut points = Vec::new();
            let mut values = Vec::new();
            for &(id, model) in children {
                let b = &plan.boxes[id];
                for j in id as u64 * m + 1..=(id as u64 + 1) * m {
                    let u: Vec<f64> = halton_exact(j, k).iter().map(|&(n, d)| n as f64 / d as f64).collect();
                    let x = b.lerp(&u);
                    values.push(model.eval_f64(&x));
                    points.push(x);
                }
            }
            let raw = DataSet::new((), k, points, values).map_err(|e| e.to_string())?;
            let axes = cell_maps(node_box);
            let data = apply_maps(&raw, &axes, &value_map).map_err(|e| e.to_string())?;
            Ok(Model::Cheb(lp_fit(&data, f, &axes, value_map)?))
        }
        FitterConfig::Wb(f) => {
            let mut pts = Vec::new();
            for &(id, model) in children {
                let Model::Poly(AnyPoly::Rational(p)) = model else {
                    return Err("WB merge needs rational models".into());
                };
                let b = &plan.boxes[id];
                for j in id as u64 * m + 1..=(id as u64 + 1) * m {
                    let x: Vec<Rational> = halton_exact(j, k)
                        .iter()
                        .enumerate()
                        .map(|(a, &(n, d))| {
                            let lo = Rational::from_f64(b.lo[a], &()).expect("finite box");
                            let hi = Rational::from_f64(b.hi[a], &()).expect("finite box");
                            let t = Rational::from_ratio(n as i64, d as i64, &()).expect("nonzero denominator");
                            lo.clone() + (hi - lo) * t
                        })
                        .collect();
                    let z = p.eval(&x).map_err(|e| e.to_string())?;
                    pts.push((x, z));
                }
            }
            let poly: MultiPoly<Rational> = if k == 1 {
                let prob = WbProblem::new(
                    pts.into_iter().map(|(mut x, z)| (x.remove(0), z)).collect(),
                    f.degree,
                    0,
                )
                .map_err(|e| e.to_string())?;
                wb_decode(&prob).map_err(|e| e.to_string())?.poly
            } else {
                let prob = MvProblem::new(pts, f.degree, 0).map_err(|e| e.to_string())?;
                mv_wb_decode(&prob).map_err(|e| e.to_string())?.poly
            };
            Ok(Model::Poly(AnyPoly::Rational(poly)))
        }
    }
}

fn box_sup_distance(a: &LocalModel, b: &LocalModel, cell: &Cell) -> f64 {
    let bounds: Vec<(f64, f64)> = cell.lo.iter().copied().zip(cell.hi.iter().copied()).collect();
    crate::algebra::sup_norm_on_box(|x| a.eval_f64(x) - b.eval_f64(x), &bounds, DRIFT_GRID)
}
