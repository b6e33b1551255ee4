//! Exact sparse linear algebra.
//!
//! Ranks and kernels are computed with fraction-free (Bareiss) elimination.
//! Large sparse inputs are first split into connected components of their
//! row/column incidence graph, so the dense elimination only ever sees one
//! block of the boundary operator at a time.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::scalar::ExactField;

/// gcd with the convention gcd(0, m) = m.
pub fn kappa(n: u64, m: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::ZeroWinding);
    }
    Ok(num_integer::gcd(n, m))
}

/// Sparse matrix without stored zeros.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMat<T> {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), T>,
}

impl<T: ExactField> SparseMat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut a = Self::zeros(n, n);
        for i in 0..n {
            a.entries.insert((i, i), T::one());
        }
        a
    }

    pub fn from_dense(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut a = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    row.len()
                )));
            }
            for (j, v) in row.iter().enumerate() {
                a.set(i, j, v.clone())?;
            }
        }
        Ok(a)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    fn check(&self, row: usize, col: usize) -> Result<()> {
        if row >= self.rows || col >= self.cols {
            return Err(Error::OutOfBounds {
                row,
                col,
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(())
    }

    /// Overwrites an entry; writing zero removes it.
    pub fn set(&mut self, row: usize, col: usize, value: T) -> Result<()> {
        self.check(row, col)?;
        if value.is_zero() {
            self.entries.remove(&(row, col));
        } else {
            self.entries.insert((row, col), value);
        }
        Ok(())
    }

    pub fn add_to(&mut self, row: usize, col: usize, value: T) -> Result<()> {
        self.check(row, col)?;
        let sum = match self.entries.get(&(row, col)) {
            Some(old) => old.clone() + value,
            None => value,
        };
        self.set(row, col, sum)
    }

    pub fn get(&self, row: usize, col: usize) -> Option<&T> {
        self.entries.get(&(row, col))
    }

    /// Nonzero entries in (row, col) order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut d = vec![vec![T::zero(); self.cols]; self.rows];
        for (&(r, c), v) in &self.entries {
            d[r][c] = v.clone();
        }
        d
    }

    pub fn mul_vec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} against {} columns",
                x.len(),
                self.cols
            )));
        }
        let mut y = vec![T::zero(); self.rows];
        for (&(r, c), v) in &self.entries {
            if !x[c].is_zero() {
                y[r] = y[r].clone() + v.clone() * x[c].clone();
            }
        }
        Ok(y)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for (&(i, k), a) in &self.entries {
            for (&(_, j), b) in other.entries.range((k, 0)..(k + 1, 0)) {
                out.add_to(i, j, a.clone() * b.clone())?;
            }
        }
        Ok(out)
    }

    /// Restriction to the given rows and columns, renumbered in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        let row_pos: BTreeMap<usize, usize> = rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let col_pos: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let bad_row = rows.iter().find(|&&r| r >= self.rows);
        let bad_col = cols.iter().find(|&&c| c >= self.cols);
        if bad_row.is_some() || bad_col.is_some() {
            return Err(Error::OutOfBounds {
                row: bad_row.copied().unwrap_or(0),
                col: bad_col.copied().unwrap_or(0),
                rows: self.rows,
                cols: self.cols,
            });
        }
        let mut out = Self::zeros(rows.len(), cols.len());
        for (&(r, c), v) in &self.entries {
            if let (Some(&i), Some(&j)) = (row_pos.get(&r), col_pos.get(&c)) {
                out.entries.insert((i, j), v.clone());
            }
        }
        Ok(out)
    }

    /// Row/column components of the bipartite incidence graph.
    ///
    /// Columns without entries form singleton components with no rows.
    fn components(&self) -> Vec<(Vec<usize>, Vec<usize>)> {
        // union-find over rows (0..rows) and columns (rows..rows+cols)
        let n = self.rows + self.cols;
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(r, c) in self.entries.keys() {
            let a = find(&mut parent, r);
            let b = find(&mut parent, self.rows + c);
            if a != b {
                parent[a] = b;
            }
        }
        let mut groups: BTreeMap<usize, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
        for c in 0..self.cols {
            let root = find(&mut parent, self.rows + c);
            groups.entry(root).or_default().1.push(c);
        }
        for r in 0..self.rows {
            let root = find(&mut parent, r);
            if let Some(g) = groups.get_mut(&root) {
                g.0.push(r);
            }
        }
        groups.into_values().collect()
    }
}

/// Fraction-free row echelon form of a dense matrix.
#[derive(Clone, Debug)]
pub struct Echelon<T> {
    /// Echelon rows; only the first `pivots.len()` rows are nonzero.
    pub rows: Vec<Vec<T>>,
    /// Pivot column of each nonzero row.
    pub pivots: Vec<usize>,
}

impl<T> Echelon<T> {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Bareiss elimination. Every intermediate entry is a minor of the input, so
/// over an integral domain the division by the previous pivot is exact.
pub fn bareiss<T: ExactField>(mut a: Vec<Vec<T>>) -> Echelon<T> {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut prev = T::one();
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
        let (top, rest) = a.split_at_mut(r + 1);
        let pivot_row = &top[r];
        let pivot = pivot_row[c].clone();
        for row in rest.iter_mut() {
            let lead = row[c].clone();
            for j in c + 1..cols {
                if lead.is_zero() || pivot_row[j].is_zero() {
                    if !row[j].is_zero() {
                        row[j] = pivot.clone() * row[j].clone() / prev.clone();
                    }
                    continue;
                }
                let v = pivot.clone() * row[j].clone() - lead.clone() * pivot_row[j].clone();
                row[j] = v / prev.clone();
            }
            row[c] = T::zero();
        }
        prev = pivot;
        pivots.push(c);
        r += 1;
    }
    Echelon { rows: a, pivots }
}

/// Kernel basis from an echelon form: one vector per free column, with a 1
/// in that column and 0 in the other free columns.
fn kernel_from_echelon<T: ExactField>(e: &Echelon<T>, cols: usize) -> Vec<Vec<T>> {
    let mut is_pivot = vec![false; cols];
    for &p in &e.pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..cols).filter(|&c| !is_pivot[c]) {
        let mut x = vec![T::zero(); cols];
        x[free] = T::one();
        for (k, &p) in e.pivots.iter().enumerate().rev() {
            let row = &e.rows[k];
            let mut s = T::zero();
            for j in p + 1..cols {
                if !row[j].is_zero() && !x[j].is_zero() {
                    s = s + row[j].clone() * x[j].clone();
                }
            }
            x[p] = -s / row[p].clone();
        }
        basis.push(x);
    }
    basis
}

#[derive(Clone, Debug, PartialEq)]
pub struct RankKernel<T> {
    pub rank: usize,
    pub kernel: Vec<Vec<T>>,
}

/// Rank and a kernel basis of a dense matrix with `cols` columns.
pub fn dense_rank_and_kernel<T: ExactField>(a: Vec<Vec<T>>, cols: usize) -> RankKernel<T> {
    let e = bareiss(a);
    RankKernel {
        rank: e.rank(),
        kernel: kernel_from_echelon(&e, cols),
    }
}

/// Rank and kernel basis. Kernel vectors are in column order of the
/// components they come from, each normalized to 1 on its free column.
pub fn rank_and_kernel<T: ExactField>(a: &SparseMat<T>) -> RankKernel<T> {
    let mut rank = 0;
    let mut kernel: Vec<Vec<T>> = Vec::new();
    for (rows, cols) in a.components() {
        let sub = a.submatrix(&rows, &cols).expect("component indices are in range");
        let rk = dense_rank_and_kernel(sub.to_dense(), cols.len());
        rank += rk.rank;
        for v in rk.kernel {
            let mut full = vec![T::zero(); a.cols];
            for (x, &c) in v.into_iter().zip(&cols) {
                full[c] = x;
            }
            kernel.push(full);
        }
    }
    // deterministic order: by the free column (first nonzero from the right
    // is not canonical, so sort by the position of the unit entry)
    kernel.sort_by_key(|v| leading_unit(v));
    RankKernel { rank, kernel }
}

fn leading_unit<T: ExactField>(v: &[T]) -> usize {
    v.iter().rposition(|x| x.is_one()).unwrap_or(usize::MAX)
}

pub fn image_rank<T: ExactField>(a: &SparseMat<T>) -> usize {
    rank_and_kernel(a).rank
}

/// Rank of a list of vectors of equal length.
pub fn rank_of<T: ExactField>(vectors: &[Vec<T>]) -> usize {
    if vectors.is_empty() {
        return 0;
    }
    bareiss(vectors.to_vec()).rank()
}

/// Coefficients x with Σ x_i · vectors[i] = target, if target lies in the span.
pub fn solve_in_span<T: ExactField>(vectors: &[Vec<T>], target: &[T]) -> Option<Vec<T>> {
    let k = vectors.len();
    // columns: the vectors, then the target
    let rows = target.len();
    let a: Vec<Vec<T>> = (0..rows)
        .map(|r| {
            vectors
                .iter()
                .map(|v| v[r].clone())
                .chain(std::iter::once(target[r].clone()))
                .collect()
        })
        .collect();
    let rk = dense_rank_and_kernel(a, k + 1);
    let w = rk.kernel.iter().find(|w| !w[k].is_zero())?;
    let scale = -w[k].clone();
    Some(w[..k].iter().map(|x| x.clone() / scale.clone()).collect())
}

/// A growing linearly independent set, kept in reduced echelon form.
#[derive(Clone, Debug)]
pub struct SpanBasis<T> {
    dim: usize,
    rows: Vec<Vec<T>>,
    pivots: Vec<usize>,
}

impl<T: ExactField> SpanBasis<T> {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// `v` minus its projection onto the pivot columns of the basis.
    pub fn reduce(&self, v: &[T]) -> Vec<T> {
        assert_eq!(v.len(), self.dim, "vector length");
        let mut r = v.to_vec();
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            if r[p].is_zero() {
                continue;
            }
            let f = r[p].clone();
            for (x, y) in r.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x = x.clone() - f.clone() * y.clone();
                }
            }
        }
        r
    }

    pub fn contains(&self, v: &[T]) -> bool {
        self.reduce(v).iter().all(Zero::is_zero)
    }

    /// Adds `v` if it is independent of the basis; returns whether it was added.
    pub fn insert(&mut self, v: &[T]) -> bool {
        let mut r = self.reduce(v);
        let Some(p) = r.iter().position(|x| !x.is_zero()) else {
            return false;
        };
        let lead = r[p].clone();
        for x in r.iter_mut() {
            *x = x.clone() / lead.clone();
        }
        for row in &mut self.rows {
            let f = row[p].clone();
            if f.is_zero() {
                continue;
            }
            for (x, y) in row.iter_mut().zip(&r) {
                if !y.is_zero() {
                    *x = x.clone() - f.clone() * y.clone();
                }
            }
        }
        self.rows.push(r);
        self.pivots.push(p);
        true
    }
}

/// Reduced row echelon form of a set of vectors, zero rows dropped.
pub fn rref<T: ExactField>(vectors: &[Vec<T>]) -> Vec<Vec<T>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let e = bareiss(vectors.to_vec());
    let mut rows: Vec<Vec<T>> = e.rows[..e.rank()].to_vec();
    for (k, &p) in e.pivots.iter().enumerate() {
        let lead = rows[k][p].clone();
        for x in rows[k].iter_mut() {
            *x = x.clone() / lead.clone();
        }
        for i in 0..k {
            let f = rows[i][p].clone();
            if f.is_zero() {
                continue;
            }
            let pivot_row = rows[k].clone();
            for (x, y) in rows[i].iter_mut().zip(pivot_row) {
                *x = x.clone() - f.clone() * y;
            }
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rat;
    use num_traits::Zero;

    fn q(n: i64) -> Rat {
        Rat::from_int(n)
    }

    fn mat(rows: &[&[i64]]) -> SparseMat<Rat> {
        let d: Vec<Vec<Rat>> = rows.iter().map(|r| r.iter().map(|&x| q(x)).collect()).collect();
        SparseMat::from_dense(&d).unwrap()
    }

    #[test]
    fn kappa_values() {
        assert_eq!(kappa(6, 4).unwrap(), 2);
        assert_eq!(kappa(0, 5).unwrap(), 5);
        assert_eq!(kappa(3, 5).unwrap(), 1);
        assert_eq!(kappa(3, 0), Err(Error::ZeroWinding));
    }

    #[test]
    fn identity_has_full_rank() {
        let rk = rank_and_kernel(&SparseMat::<Rat>::identity(3));
        assert_eq!(rk.rank, 3);
        assert!(rk.kernel.is_empty());
        assert_eq!(image_rank(&SparseMat::<Rat>::identity(4)), 4);
    }

    #[test]
    fn proportional_rows() {
        let a = mat(&[&[1, 2], &[2, 4]]);
        let rk = rank_and_kernel(&a);
        assert_eq!(rk.rank, 1);
        assert_eq!(rk.kernel, vec![vec![q(-2), q(1)]]);
    }

    #[test]
    fn zero_map() {
        let a = SparseMat::<Rat>::zeros(2, 3);
        let rk = rank_and_kernel(&a);
        assert_eq!(rk.rank, 0);
        assert_eq!(rk.kernel.len(), 3);
        assert_eq!(image_rank(&a), 0);
    }

    #[test]
    fn outer_product_rank_one() {
        assert_eq!(image_rank(&mat(&[&[1, -1], &[1, -1]])), 1);
    }

    #[test]
    fn empty_matrix() {
        let a = SparseMat::<Rat>::zeros(0, 0);
        let rk = rank_and_kernel(&a);
        assert_eq!((rk.rank, rk.kernel.len()), (0, 0));
    }

    #[test]
    fn set_zero_removes_entry() {
        let mut a = SparseMat::<Rat>::zeros(2, 2);
        a.set(0, 1, q(3)).unwrap();
        a.add_to(0, 1, q(-3)).unwrap();
        assert_eq!(a.nnz(), 0);
        assert!(matches!(a.set(2, 0, q(1)), Err(Error::OutOfBounds { .. })));
    }

    #[test]
    fn block_diagonal_kernel_lifts() {
        let a = mat(&[&[1, 1, 0, 0], &[0, 0, 0, 0], &[0, 0, 2, 4]]);
        let rk = rank_and_kernel(&a);
        assert_eq!(rk.rank, 2);
        assert_eq!(rk.kernel.len(), 2);
        for v in &rk.kernel {
            assert!(a.mul_vec(v).unwrap().iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn solve_and_rref() {
        let v = vec![vec![q(1), q(0), q(1)], vec![q(0), q(1), q(1)]];
        let x = solve_in_span(&v, &[q(2), q(3), q(5)]).unwrap();
        assert_eq!(x, vec![q(2), q(3)]);
        assert!(solve_in_span(&v, &[q(0), q(0), q(1)]).is_none());
        let r = rref(&[vec![q(2), q(4)], vec![q(1), q(3)]]);
        assert_eq!(r, vec![vec![q(1), q(0)], vec![q(0), q(1)]]);
    }

    #[test]
    fn fixed_width_ratio_works() {
        use num_rational::Ratio;
        let d = vec![
            vec![Ratio::<i64>::from_int(1), Ratio::from_int(2)],
            vec![Ratio::from_int(2), Ratio::from_int(4)],
        ];
        let a = SparseMat::from_dense(&d).unwrap();
        assert_eq!(image_rank(&a), 1);
    }
}
