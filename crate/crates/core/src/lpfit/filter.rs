//! Square-neighbourhood filter for Byzantine values.
//!
//! A low-degree polynomial is nearly constant on a small square, so inside
//! each square the clean values cluster within `2 delta` of a robust centre
//! and anything further away is dropped.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::aggregate::DataSet;

use super::LpError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CenterRule {
    Mean,
    #[default]
    Median,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FilterConfig {
    pub degree: u32,
    pub delta: f64,
    pub rho_clean: f64,
    /// Half side of each square; `delta / d^3` when unset.
    pub square_halfwidth: Option<f64>,
    /// Stop once more than this many points are kept; `ceil(d^2 / delta)`
    /// when unset.
    pub target_count: Option<usize>,
    pub center_rule: CenterRule,
    /// Squares holding fewer points are skipped.
    pub min_square_count: usize,
}

impl FilterConfig {
    pub fn new(degree: u32, delta: f64, rho_clean: f64) -> Self {
        FilterConfig {
            degree,
            delta,
            rho_clean,
            square_halfwidth: None,
            target_count: None,
            center_rule: CenterRule::Median,
            min_square_count: 3,
        }
    }

    pub fn halfwidth(&self) -> f64 {
        self.square_halfwidth
            .unwrap_or_else(|| self.delta / (self.degree.max(1) as f64).powi(3))
    }

    pub fn target(&self) -> usize {
        self.target_count.unwrap_or_else(|| {
            let d = self.degree.max(1) as f64;
            (d * d / self.delta).ceil() as usize
        })
    }

    pub fn validate(&self) -> Result<(), LpError> {
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(LpError::InvalidConfig(format!("delta = {} must be positive", self.delta)));
        }
        if !(self.rho_clean > 0.0 && self.rho_clean <= 1.0) {
            return Err(LpError::InvalidConfig(format!("rho_clean = {} is not in (0, 1]", self.rho_clean)));
        }
        if !(self.halfwidth() > 0.0) {
            return Err(LpError::InvalidConfig("square half-width must be positive".into()));
        }
        if self.min_square_count == 0 {
            return Err(LpError::InvalidConfig("min_square_count must be at least 1".into()));
        }
        Ok(())
    }
}

/// One processed square.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Square {
    /// Original index of the seed point.
    pub seed: usize,
    pub origin: Vec<f64>,
    pub center: f64,
    /// Points inside the square, judged here or earlier.
    pub members: usize,
    /// Original indices judged by this square.
    pub kept: Vec<usize>,
    pub dropped: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct FilterOutcome {
    /// Kept rows in input order, original indices preserved.
    pub data: DataSet<f64>,
    pub squares: Vec<Square>,
}

impl FilterOutcome {
    pub fn judged(&self) -> impl Iterator<Item = usize> + '_ {
        self.squares
            .iter()
            .flat_map(|s| s.kept.iter().chain(&s.dropped).copied())
    }
}

/// Buckets of side `h` so a square of half-width `h` touches at most 3^k.
struct CellIndex {
    h: f64,
    cells: HashMap<Vec<i64>, Vec<usize>>,
}

impl CellIndex {
    fn new(data: &DataSet<f64>, h: f64) -> Self {
        let mut cells: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, (x, _)) in data.iter().enumerate() {
            cells.entry(Self::key(x, h)).or_default().push(i);
        }
        CellIndex { h, cells }
    }

    fn key(x: &[f64], h: f64) -> Vec<i64> {
        x.iter().map(|&c| (c / h).floor() as i64).collect()
    }

    /// Rows within `h` of `origin` in the max norm, ascending.
    fn square(&self, data: &DataSet<f64>, origin: &[f64]) -> Vec<usize> {
        let base = Self::key(origin, self.h);
        let k = base.len();
        let mut out = Vec::new();
        let mut offs = vec![-1i64; k];
        loop {
            let key: Vec<i64> = base.iter().zip(&offs).map(|(b, o)| b + o).collect();
            if let Some(rows) = self.cells.get(&key) {
                for &i in rows {
                    let p = data.point(i);
                    if p.iter().zip(origin).all(|(a, b)| (a - b).abs() <= self.h) {
                        out.push(i);
                    }
                }
            }
            let mut a = 0;
            while a < k {
                offs[a] += 1;
                if offs[a] <= 1 {
                    break;
                }
                offs[a] = -1;
                a += 1;
            }
            if a == k {
                break;
            }
        }
        out.sort_unstable();
        out
    }
}

fn center(values: &mut [f64], rule: CenterRule) -> f64 {
    match rule {
        CenterRule::Mean => values.iter().sum::<f64>() / values.len() as f64,
        CenterRule::Median => {
            values.sort_by(|a, b| a.total_cmp(b));
            let n = values.len();
            if n % 2 == 1 {
                values[n / 2]
            } else {
                0.5 * (values[n / 2 - 1] + values[n / 2])
            }
        }
    }
}

/// Seeds are taken in input order, skipping rows some earlier square has
/// already judged. Each row is judged once, by the first processed square
/// that contains it, and kept when `|z - centre| <= 2 delta`. Stops once the
/// kept count exceeds the target.
pub fn byzantine_filter(data: &DataSet<f64>, cfg: &FilterConfig) -> Result<FilterOutcome, LpError> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(LpError::Empty);
    }
    let h = cfg.halfwidth();
    let target = cfg.target();
    let index = CellIndex::new(data, h);
    let mut judged = vec![false; data.len()];
    let mut keep = vec![false; data.len()];
    let mut kept_total = 0usize;
    let mut squares = Vec::new();
    for seed in 0..data.len() {
        if kept_total > target {
            break;
        }
        if judged[seed] {
            continue;
        }
        let origin = data.point(seed).to_vec();
        let members = index.square(data, &origin);
        if members.len() < cfg.min_square_count {
            continue;
        }
        let mut vals: Vec<f64> = members.iter().map(|&i| *data.value(i)).collect();
        let c = center(&mut vals, cfg.center_rule);
        let mut sq = Square {
            seed: data.indices()[seed],
            origin,
            center: c,
            members: members.len(),
            kept: Vec::new(),
            dropped: Vec::new(),
        };
        for &i in &members {
            if judged[i] {
                continue;
            }
            judged[i] = true;
            if (data.value(i) - c).abs() <= 2.0 * cfg.delta {
                keep[i] = true;
                kept_total += 1;
                sq.kept.push(data.indices()[i]);
            } else {
                sq.dropped.push(data.indices()[i]);
            }
        }
        squares.push(sq);
    }
    if kept_total <= target {
        return Err(LpError::InsufficientCleanData {
            kept: kept_total,
            target,
        });
    }
    let positions: Vec<usize> = (0..data.len()).filter(|&i| keep[i]).collect();
    Ok(FilterOutcome {
        data: data.subset(&positions),
        squares,
    })
}

/// Re-applies recorded squares (origin and centre) in order, with no
/// stopping rule. Replaying a filter's squares on its own output keeps
/// every row.
pub fn replay_filter(data: &DataSet<f64>, cfg: &FilterConfig, squares: &[Square]) -> Result<DataSet<f64>, LpError> {
    cfg.validate()?;
    let h = cfg.halfwidth();
    let index = CellIndex::new(data, h);
    let mut judged = vec![false; data.len()];
    let mut keep = vec![false; data.len()];
    for sq in squares {
        for i in index.square(data, &sq.origin) {
            if !judged[i] {
                judged[i] = true;
                keep[i] = (data.value(i) - sq.center).abs() <= 2.0 * cfg.delta;
            }
        }
    }
    let positions: Vec<usize> = (0..data.len()).filter(|&i| keep[i]).collect();
    Ok(data.subset(&positions))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_data(n: usize, mut f: impl FnMut(f64, f64) -> f64) -> DataSet<f64> {
        let mut pts = Vec::new();
        let mut vals = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let x = -1.0 + 2.0 * i as f64 / (n - 1) as f64;
                let y = -1.0 + 2.0 * j as f64 / (n - 1) as f64;
                pts.push(vec![x, y]);
                vals.push(f(x, y));
            }
        }
        DataSet::new((), 2, pts, vals).unwrap()
    }

    #[test]
    fn clean_data_keeps_every_judged_point() {
        let data = grid_data(41, |x, y| 0.5 * (x + y));
        let mut cfg = FilterConfig::new(1, 0.05, 1.0);
        cfg.square_halfwidth = Some(0.06);
        cfg.target_count = Some(200);
        let out = byzantine_filter(&data, &cfg).unwrap();
        assert!(out.data.len() > 200);
        assert!(out.squares.iter().all(|s| s.dropped.is_empty()));
    }

    #[test]
    fn spikes_removed() {
        let data = grid_data(41, |x, y| if ((x + 1.0) * 20.0).round() as i64 % 4 == 0 && y > 0.0 { 0.9 } else { 0.1 * x });
        let mut cfg = FilterConfig::new(1, 0.05, 0.75);
        cfg.square_halfwidth = Some(0.11);
        cfg.target_count = Some(1000);
        let out = byzantine_filter(&data, &cfg).unwrap();
        for (x, z) in out.data.iter() {
            assert!((z - 0.1 * x[0]).abs() < 0.2, "kept {x:?} -> {z}");
        }
    }

    #[test]
    fn all_corrupted_fails() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let data = grid_data(21, |_, _| rng.gen_range(-1.0..1.0));
        let mut cfg = FilterConfig::new(2, 0.01, 0.8);
        cfg.square_halfwidth = Some(0.1);
        assert!(matches!(
            byzantine_filter(&data, &cfg),
            Err(LpError::InsufficientCleanData { target: 400, .. })
        ));
    }

    #[test]
    fn mean_and_median_centres() {
        assert_eq!(center(&mut [1.0, 2.0, 10.0], CenterRule::Median), 2.0);
        assert_eq!(center(&mut [1.0, 2.0, 9.0], CenterRule::Mean), 4.0);
        assert_eq!(center(&mut [4.0, 1.0, 2.0, 3.0], CenterRule::Median), 2.5);
    }

    #[test]
    fn default_square_and_target() {
        let cfg = FilterConfig::new(4, 0.05, 0.8);
        assert!((cfg.halfwidth() - 0.05 / 64.0).abs() < 1e-15);
        assert_eq!(cfg.target(), 320);
    }
}
