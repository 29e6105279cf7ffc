//! Axis-aligned boxes tiling a domain, built by repeated bisection.

use serde::{Deserialize, Serialize};

use super::DataSet;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Cell {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        assert_eq!(lo.len(), hi.len());
        Cell { lo, hi }
    }

    /// Bounding box of the data.
    pub fn bounding(data: &DataSet<f64>) -> Self {
        let k = data.dim();
        let mut lo = vec![f64::INFINITY; k];
        let mut hi = vec![f64::NEG_INFINITY; k];
        for (p, _) in data.iter() {
            for a in 0..k {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        Cell { lo, hi }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(c, (l, h))| l <= c && c <= h)
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).product()
    }

    pub fn union(&self, other: &Cell) -> Cell {
        Cell {
            lo: self.lo.iter().zip(&other.lo).map(|(a, b)| a.min(*b)).collect(),
            hi: self.hi.iter().zip(&other.hi).map(|(a, b)| a.max(*b)).collect(),
        }
    }

    /// Splits at the midpoint of the longest side (lowest axis on ties).
    pub fn bisect(&self) -> (Cell, Cell) {
        let mut axis = 0;
        for a in 1..self.dim() {
            if self.hi[a] - self.lo[a] > self.hi[axis] - self.lo[axis] {
                axis = a;
            }
        }
        let mid = 0.5 * (self.lo[axis] + self.hi[axis]);
        let mut left = self.clone();
        let mut right = self.clone();
        left.hi[axis] = mid;
        right.lo[axis] = mid;
        (left, right)
    }

    /// Point at fractional position `u` in `[0, 1]^k`.
    pub fn lerp(&self, u: &[f64]) -> Vec<f64> {
        u.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(t, (l, h))| l + (h - l) * t)
            .collect()
    }
}

/// Leaves of a bisection tree plus the tree itself, so that the merge plan can
/// pair siblings whose union is again a box.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub domain: Cell,
    pub cells: Vec<Cell>,
    /// `assignment[i]` is the cell of row `i`.
    pub assignment: Vec<usize>,
    /// Internal bisections as `(parent box, left child, right child)`, child
    /// ids being `cells` indices for leaves and `cells.len() + j` for the
    /// `j`-th split. The last entry is the root.
    pub splits: Vec<(Cell, usize, usize)>,
}

impl Partition {
    /// Bisects the largest cell until there are `count` cells, then assigns
    /// each row to the first cell containing it.
    pub fn bisect(data: &DataSet<f64>, domain: Cell, count: usize) -> Result<Self, String> {
        if count == 0 {
            return Err("need at least one cell".into());
        }
        if domain.dim() != data.dim() {
            return Err(format!("domain has {} axes, data {}", domain.dim(), data.dim()));
        }
        // Work list of (box, node id); node ids are provisional and remapped below.
        enum Node {
            Leaf(Cell),
            Split(Cell, usize, usize),
        }
        let mut nodes = vec![Node::Leaf(domain.clone())];
        let mut open = vec![0usize];
        while open.len() < count {
            let (pos, _) = open
                .iter()
                .enumerate()
                .map(|(p, &id)| match &nodes[id] {
                    Node::Leaf(c) => (p, c.volume()),
                    Node::Split(..) => unreachable!(),
                })
                .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best });
            let id = open.remove(pos);
            let cell = match &nodes[id] {
                Node::Leaf(c) => c.clone(),
                Node::Split(..) => unreachable!(),
            };
            let (l, r) = cell.bisect();
            let li = nodes.len();
            nodes.push(Node::Leaf(l));
            nodes.push(Node::Leaf(r));
            nodes[id] = Node::Split(cell, li, li + 1);
            open.insert(pos, li + 1);
            open.insert(pos, li);
        }
        // Leaves in left-to-right order become cells 0..count.
        let mut remap = vec![usize::MAX; nodes.len()];
        let mut cells = Vec::new();
        fn order(id: usize, nodes: &[Node], remap: &mut [usize], cells: &mut Vec<Cell>) {
            match &nodes[id] {
                Node::Leaf(c) => {
                    remap[id] = cells.len();
                    cells.push(c.clone());
                }
                Node::Split(_, l, r) => {
                    order(*l, nodes, remap, cells);
                    order(*r, nodes, remap, cells);
                }
            }
        }
        order(0, &nodes, &mut remap, &mut cells);
        let mut splits = Vec::new();
        fn post(id: usize, nodes: &[Node], remap: &mut [usize], splits: &mut Vec<(Cell, usize, usize)>, leaves: usize) {
            if let Node::Split(c, l, r) = &nodes[id] {
                post(*l, nodes, remap, splits, leaves);
                post(*r, nodes, remap, splits, leaves);
                remap[id] = leaves + splits.len();
                splits.push((c.clone(), remap[*l], remap[*r]));
            }
        }
        post(0, &nodes, &mut remap, &mut splits, cells.len());
        let assignment = assign(data, &cells)?;
        Ok(Partition {
            domain,
            cells,
            assignment,
            splits,
        })
    }

    /// Rows of each cell, in dataset order.
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.cells.len()];
        for (i, &c) in self.assignment.iter().enumerate() {
            out[c].push(i);
        }
        out
    }
}

fn assign(data: &DataSet<f64>, cells: &[Cell]) -> Result<Vec<usize>, String> {
    data.iter()
        .enumerate()
        .map(|(i, (p, _))| {
            cells
                .iter()
                .position(|c| c.contains(p))
                .ok_or_else(|| format!("row {i} lies outside the domain"))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_data() -> DataSet<f64> {
        let mut pts = Vec::new();
        for i in 0..10 {
            for j in 0..10 {
                pts.push(vec![i as f64 / 9.0, j as f64 / 9.0]);
            }
        }
        let n = pts.len();
        DataSet::new((), 2, pts, vec![0.0; n]).unwrap()
    }

    #[test]
    fn four_cells_tile_the_square() {
        let d = square_data();
        let p = Partition::bisect(&d, Cell::bounding(&d), 4).unwrap();
        assert_eq!(p.cells.len(), 4);
        assert!(p.cells.iter().all(|c| (c.volume() - 0.25).abs() < 1e-12));
        assert_eq!(p.splits.len(), 3);
        assert_eq!(p.splits.last().unwrap().0, p.domain);
        let sizes: Vec<usize> = p.members().iter().map(Vec::len).collect();
        assert_eq!(sizes.iter().sum::<usize>(), 100);
        assert!(sizes.iter().all(|&s| s == 25));
    }

    #[test]
    fn siblings_union_to_parent() {
        let d = square_data();
        let p = Partition::bisect(&d, Cell::bounding(&d), 3).unwrap();
        let boxes: Vec<Cell> = p
            .cells
            .iter()
            .cloned()
            .chain(p.splits.iter().map(|s| s.0.clone()))
            .collect();
        for (parent, l, r) in &p.splits {
            assert_eq!(&boxes[*l].union(&boxes[*r]), parent);
        }
    }

    #[test]
    fn single_cell() {
        let d = square_data();
        let p = Partition::bisect(&d, Cell::bounding(&d), 1).unwrap();
        assert!(p.splits.is_empty());
        assert!(p.assignment.iter().all(|&c| c == 0));
    }
}
