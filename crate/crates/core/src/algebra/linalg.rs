//! Dense linear solves over a [`Field`].

use super::field::Field;

#[derive(Clone, Debug, PartialEq)]
pub enum LinearSolution<F> {
    Inconsistent,
    /// A particular solution with every free column set to zero.
    Solved {
        x: Vec<F>,
        rank: usize,
        pivots: Vec<usize>,
    },
}

impl<F> LinearSolution<F> {
    pub fn unique(&self, cols: usize) -> bool {
        matches!(self, LinearSolution::Solved { rank, .. } if *rank == cols)
    }
}

/// Row reduction taking the first nonzero entry as pivot. Exact fields only
/// make sense here; floats use [`partial_pivot_solve`].
pub fn gauss_jordan<F: Field>(mut a: Vec<Vec<F>>, b: Vec<F>, ctx: &F::Ctx) -> LinearSolution<F> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    for (row, rhs) in a.iter_mut().zip(b) {
        row.push(rhs);
    }
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].inv().expect("nonzero pivot is invertible");
        for j in c..=cols {
            a[r][j] = a[r][j].clone() * inv.clone();
        }
        for i in 0..rows {
            if i == r || a[i][c].is_zero() {
                continue;
            }
            let factor = a[i][c].clone();
            for j in c..=cols {
                let v = a[r][j].clone() * factor.clone();
                a[i][j] = a[i][j].clone() - v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    if (r..rows).any(|i| !a[i][cols].is_zero()) {
        return LinearSolution::Inconsistent;
    }
    let mut x = vec![F::zero(ctx); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = a[i][cols].clone();
    }
    LinearSolution::Solved {
        x,
        rank: r,
        pivots,
    }
}

/// Gaussian elimination with partial pivoting for floating point systems.
/// Pivots below `1e-12` times the largest entry are treated as zero.
pub fn partial_pivot_solve<T>(mut a: Vec<Vec<T>>, b: Vec<T>) -> LinearSolution<T>
where
    T: num_traits::Float + Field,
{
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    for (row, rhs) in a.iter_mut().zip(b) {
        row.push(rhs);
    }
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(<T as num_traits::Zero>::zero(), |m, v| m.max(v.abs()));
    let tol = scale * T::from(1e-12).unwrap();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let (p, best) = (r..rows)
            .map(|i| (i, a[i][c].abs()))
            .fold((r, <T as num_traits::Zero>::zero()), |acc, v| if v.1 > acc.1 { v } else { acc });
        if best <= tol {
            continue;
        }
        a.swap(r, p);
        let piv = a[r][c];
        for j in c..=cols {
            a[r][j] = a[r][j] / piv;
        }
        for i in 0..rows {
            if i != r {
                let f = a[i][c];
                if f != <T as num_traits::Zero>::zero() {
                    for j in c..=cols {
                        a[i][j] = a[i][j] - f * a[r][j];
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let rhs_tol = tol.max(T::from(1e-9).unwrap());
    if (r..rows).any(|i| a[i][cols].abs() > rhs_tol) {
        return LinearSolution::Inconsistent;
    }
    let mut x = vec![<T as num_traits::Zero>::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = a[i][cols];
    }
    LinearSolution::Solved {
        x,
        rank: r,
        pivots,
    }
}
