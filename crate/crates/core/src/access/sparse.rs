use crate::error::check_index;
use crate::{Error, Result, C64};
use nalgebra::DMatrix;

/// Query access to an `s`-sparse matrix: the `l`-th nonzero of a row or of a
/// column, in ascending position order.
pub trait SparseQuery {
    fn rows(&self) -> usize;

    fn cols(&self) -> usize;

    /// Bound on the nonzeros in any row or column.
    fn sparsity(&self) -> usize;

    /// The `l`-th nonzero of row `i` as `(column, value)`, or `None` when the
    /// row has fewer than `l` nonzeros. Errors when `i` is out of range or
    /// `l` is outside `1..=s`.
    fn row_entry(&self, i: usize, l: usize) -> Result<Option<(usize, C64)>>;

    /// The `l`-th nonzero of column `j` as `(row, value)`.
    fn col_entry(&self, j: usize, l: usize) -> Result<Option<(usize, C64)>>;
}

/// Sparse complex matrix indexed both by rows and by columns.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    rows: usize,
    cols: usize,
    sparsity: usize,
    row_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    row_val: Vec<C64>,
    col_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    col_val: Vec<C64>,
}

impl SparseMatrix {
    /// Builds a matrix from 1-based `(row, col, value)` triplets in any order.
    ///
    /// Duplicate positions and explicit zeros are rejected. When `sparsity` is
    /// given, every row and column must respect it; otherwise the tightest
    /// bound (at least 1) is used.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        mut triplets: Vec<(usize, usize, C64)>,
        sparsity: Option<usize>,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput("matrix dimensions must be positive".into()));
        }
        for &(i, j, v) in &triplets {
            check_index(i, rows)?;
            check_index(j, cols)?;
            if v == C64::new(0.0, 0.0) {
                return Err(Error::InvalidInput(format!("explicit zero stored at ({i}, {j})")));
            }
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::InvalidInput(format!("non-finite value at ({i}, {j})")));
            }
        }
        triplets.sort_by_key(|&(i, j, _)| (i, j));
        if let Some(w) = triplets.windows(2).find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1)) {
            return Err(Error::InvalidInput(format!("duplicate entry at ({}, {})", w[0].0, w[0].1)));
        }

        let mut row_count = vec![0usize; rows];
        let mut col_count = vec![0usize; cols];
        for &(i, j, _) in &triplets {
            row_count[i - 1] += 1;
            col_count[j - 1] += 1;
        }
        let widest = row_count.iter().chain(&col_count).copied().max().unwrap_or(0).max(1);
        let sparsity = match sparsity {
            Some(s) if s < widest => {
                return Err(Error::InvalidInput(format!(
                    "a row or column has {widest} nonzeros, exceeding sparsity {s}"
                )))
            }
            Some(0) => return Err(Error::InvalidInput("sparsity must be positive".into())),
            Some(s) => s,
            None => widest,
        };

        let row_ptr = prefix_sums(&row_count);
        let row_idx = triplets.iter().map(|t| t.1).collect();
        let row_val = triplets.iter().map(|t| t.2).collect();

        let col_ptr = prefix_sums(&col_count);
        let mut fill = col_ptr.clone();
        let nnz = triplets.len();
        let mut col_idx = vec![0usize; nnz];
        let mut col_val = vec![C64::new(0.0, 0.0); nnz];
        // Triplets are row-major sorted, so each column is filled in ascending row order.
        for &(i, j, v) in &triplets {
            let slot = fill[j - 1];
            col_idx[slot] = i;
            col_val[slot] = v;
            fill[j - 1] += 1;
        }

        Ok(Self { rows, cols, sparsity, row_ptr, row_idx, row_val, col_ptr, col_idx, col_val })
    }

    /// Builds from a dense row-major array, keeping only nonzero entries.
    pub fn from_dense(rows: usize, cols: usize, dense: &[C64], sparsity: Option<usize>) -> Result<Self> {
        if dense.len() != rows * cols {
            return Err(Error::Shape(format!("{} entries for a {rows}x{cols} matrix", dense.len())));
        }
        let triplets = dense
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != C64::new(0.0, 0.0))
            .map(|(k, &v)| (k / cols + 1, k % cols + 1, v))
            .collect();
        Self::from_triplets(rows, cols, triplets, sparsity)
    }

    pub fn from_nalgebra(m: &DMatrix<C64>, sparsity: Option<usize>) -> Result<Self> {
        let mut triplets = Vec::new();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let v = m[(i, j)];
                if v != C64::new(0.0, 0.0) {
                    triplets.push((i + 1, j + 1, v));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), triplets, sparsity)
    }

    pub fn identity(n: usize) -> Result<Self> {
        Self::diagonal(&vec![C64::new(1.0, 0.0); n])
    }

    /// Diagonal matrix; zero diagonal entries are simply not stored.
    pub fn diagonal(diag: &[C64]) -> Result<Self> {
        let triplets = diag
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != C64::new(0.0, 0.0))
            .map(|(k, &v)| (k + 1, k + 1, v))
            .collect();
        Self::from_triplets(diag.len(), diag.len(), triplets, Some(1))
    }

    pub fn nnz(&self) -> usize {
        self.row_val.len()
    }

    /// Nonzeros as 1-based triplets in ascending `(row, col)` order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.rows).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |k| (i + 1, self.row_idx[k], self.row_val[k]))
        })
    }

    /// Nonzeros of row `i` (1-based) as `(col, value)` pairs.
    pub fn row(&self, i: usize) -> Result<impl Iterator<Item = (usize, C64)> + '_> {
        check_index(i, self.rows)?;
        let range = self.row_ptr[i - 1]..self.row_ptr[i];
        Ok(range.map(move |k| (self.row_idx[k], self.row_val[k])))
    }

    pub fn max_row_nnz(&self) -> usize {
        self.row_ptr.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0)
    }

    pub fn max_col_nnz(&self) -> usize {
        self.col_ptr.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0)
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.rows, self.cols);
        for (i, j, v) in self.triplets() {
            m[(i - 1, j - 1)] = v;
        }
        m
    }

    /// Upper bound on the spectral norm, `sqrt(max row l1 * max column l1)`.
    pub fn norm_bound(&self) -> f64 {
        let row_l1 = (0..self.rows)
            .map(|i| self.row_val[self.row_ptr[i]..self.row_ptr[i + 1]].iter().map(|v| v.norm()).sum::<f64>())
            .fold(0.0, f64::max);
        let col_l1 = (0..self.cols)
            .map(|j| self.col_val[self.col_ptr[j]..self.col_ptr[j + 1]].iter().map(|v| v.norm()).sum::<f64>())
            .fold(0.0, f64::max);
        (row_l1 * col_l1).sqrt()
    }

    /// Multiplies every stored value by a nonzero real factor.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        if factor == 0.0 || !factor.is_finite() {
            return Err(Error::InvalidInput(format!("cannot scale by {factor}")));
        }
        let mut out = self.clone();
        out.row_val.iter_mut().for_each(|v| *v *= factor);
        out.col_val.iter_mut().for_each(|v| *v *= factor);
        Ok(out)
    }

    pub fn adjoint(&self) -> Adjoint<'_, SparseMatrix> {
        Adjoint(self)
    }

    fn check_rank(&self, l: usize) -> Result<()> {
        if l == 0 || l > self.sparsity {
            Err(Error::Range { index: l, len: self.sparsity })
        } else {
            Ok(())
        }
    }
}

fn prefix_sums(counts: &[usize]) -> Vec<usize> {
    let mut ptr = Vec::with_capacity(counts.len() + 1);
    ptr.push(0);
    for c in counts {
        ptr.push(ptr.last().unwrap() + c);
    }
    ptr
}

impl SparseQuery for SparseMatrix {
    fn rows(&self) -> usize {
        self.rows
    }

    fn cols(&self) -> usize {
        self.cols
    }

    fn sparsity(&self) -> usize {
        self.sparsity
    }

    fn row_entry(&self, i: usize, l: usize) -> Result<Option<(usize, C64)>> {
        check_index(i, self.rows)?;
        self.check_rank(l)?;
        let k = self.row_ptr[i - 1] + l - 1;
        Ok((k < self.row_ptr[i]).then(|| (self.row_idx[k], self.row_val[k])))
    }

    fn col_entry(&self, j: usize, l: usize) -> Result<Option<(usize, C64)>> {
        check_index(j, self.cols)?;
        self.check_rank(l)?;
        let k = self.col_ptr[j - 1] + l - 1;
        Ok((k < self.col_ptr[j]).then(|| (self.col_idx[k], self.col_val[k])))
    }
}

/// Conjugate-transpose view: rows and columns swap roles and values are
/// conjugated on the fly.
#[derive(Debug)]
pub struct Adjoint<'a, Q: SparseQuery + ?Sized>(pub &'a Q);

impl<Q: SparseQuery + ?Sized> Clone for Adjoint<'_, Q> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<Q: SparseQuery + ?Sized> Copy for Adjoint<'_, Q> {}

impl<Q: SparseQuery + ?Sized> SparseQuery for Adjoint<'_, Q> {
    fn rows(&self) -> usize {
        self.0.cols()
    }

    fn cols(&self) -> usize {
        self.0.rows()
    }

    fn sparsity(&self) -> usize {
        self.0.sparsity()
    }

    fn row_entry(&self, i: usize, l: usize) -> Result<Option<(usize, C64)>> {
        Ok(self.0.col_entry(i, l)?.map(|(r, v)| (r, v.conj())))
    }

    fn col_entry(&self, j: usize, l: usize) -> Result<Option<(usize, C64)>> {
        Ok(self.0.row_entry(j, l)?.map(|(c, v)| (c, v.conj())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn one() -> C64 {
        C64::new(1.0, 0.0)
    }

    #[test]
    fn identity_rows() {
        let a = SparseMatrix::identity(4).unwrap();
        assert_eq!(a.row_entry(2, 1).unwrap(), Some((2, one())));
        assert_eq!(a.sparsity(), 1);
        // Rank 2 exceeds s = 1 for the identity, so it is a range error.
        assert!(matches!(a.row_entry(2, 2), Err(Error::Range { .. })));
    }

    #[test]
    fn short_row_is_not_present() {
        let a = SparseMatrix::from_triplets(4, 4, (1..=4).map(|i| (i, i, one())).collect(), Some(2)).unwrap();
        assert_eq!(a.row_entry(2, 1).unwrap(), Some((2, one())));
        assert_eq!(a.row_entry(2, 2).unwrap(), None);
        assert_eq!(a.col_entry(3, 2).unwrap(), None);
    }

    #[test]
    fn out_of_range_queries() {
        let a = SparseMatrix::identity(3).unwrap();
        assert!(a.row_entry(0, 1).is_err());
        assert!(a.row_entry(4, 1).is_err());
        assert!(a.col_entry(1, 0).is_err());
    }

    #[test]
    fn duplicates_rejected() {
        let t = vec![(1, 1, one()), (2, 2, one()), (1, 1, one())];
        assert!(matches!(SparseMatrix::from_triplets(2, 2, t, None), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn zeros_rejected() {
        let t = vec![(1, 1, C64::new(0.0, 0.0))];
        assert!(SparseMatrix::from_triplets(2, 2, t, None).is_err());
    }

    #[test]
    fn sparsity_violation_rejected() {
        let t = vec![(1, 1, one()), (1, 2, one()), (1, 3, one())];
        assert!(SparseMatrix::from_triplets(3, 3, t.clone(), Some(2)).is_err());
        assert_eq!(SparseMatrix::from_triplets(3, 3, t, None).unwrap().sparsity(), 3);
    }

    #[test]
    fn column_sparsity_counts() {
        let t = vec![(1, 1, one()), (2, 1, one()), (3, 1, one())];
        assert!(SparseMatrix::from_triplets(3, 3, t, Some(2)).is_err());
    }

    fn enumerate_rows(a: &dyn SparseQuery) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(a.rows(), a.cols());
        for i in 1..=a.rows() {
            for l in 1..=a.sparsity() {
                match a.row_entry(i, l).unwrap() {
                    Some((j, v)) => m[(i - 1, j - 1)] = v,
                    None => break,
                }
            }
        }
        m
    }

    fn enumerate_cols(a: &dyn SparseQuery) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(a.rows(), a.cols());
        for j in 1..=a.cols() {
            for l in 1..=a.sparsity() {
                match a.col_entry(j, l).unwrap() {
                    Some((i, v)) => m[(i - 1, j - 1)] = v,
                    None => break,
                }
            }
        }
        m
    }

    fn random_sparse_dense(rng: &mut ChaCha8Rng, n: usize, s: usize) -> DMatrix<C64> {
        // Union of s random permutation patterns keeps every row and column at <= s.
        let mut m = DMatrix::zeros(n, n);
        for _ in 0..s {
            let mut perm: Vec<usize> = (0..n).collect();
            for k in (1..n).rev() {
                perm.swap(k, rng.random_range(0..=k));
            }
            for (i, &j) in perm.iter().enumerate() {
                m[(i, j)] = C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
            }
        }
        m
    }

    #[test]
    fn enumeration_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let dense = random_sparse_dense(&mut rng, 8, 3);
        let a = SparseMatrix::from_nalgebra(&dense, Some(3)).unwrap();
        assert_eq!(enumerate_rows(&a), dense);
        assert_eq!(enumerate_cols(&a), dense);
        assert_eq!(a.to_dense(), dense);
    }

    #[test]
    fn ascending_order_within_rows_and_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = SparseMatrix::from_nalgebra(&random_sparse_dense(&mut rng, 16, 4), Some(4)).unwrap();
        for i in 1..=16 {
            let cols: Vec<usize> = (1..=4).map_while(|l| a.row_entry(i, l).unwrap()).map(|e| e.0).collect();
            assert!(cols.windows(2).all(|w| w[0] < w[1]));
            let rows: Vec<usize> = (1..=4).map_while(|l| a.col_entry(i, l).unwrap()).map(|e| e.0).collect();
            assert!(rows.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn adjoint_view_matches_conjugate_transpose() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let dense = random_sparse_dense(&mut rng, 6, 2);
        let a = SparseMatrix::from_nalgebra(&dense, None).unwrap();
        let adj = a.adjoint();
        assert_eq!(enumerate_rows(&adj), dense.adjoint());
        assert_eq!(enumerate_cols(&adj), dense.adjoint());
    }

    #[test]
    fn rectangular_adjoint_dimensions() {
        let a = SparseMatrix::from_triplets(2, 5, vec![(1, 5, one()), (2, 3, C64::new(0.0, 2.0))], None).unwrap();
        let adj = a.adjoint();
        assert_eq!((adj.rows(), adj.cols()), (5, 2));
        assert_eq!(adj.row_entry(3, 1).unwrap(), Some((2, C64::new(0.0, -2.0))));
    }

    #[test]
    fn norm_bound_dominates_spectral_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..10 {
            let dense = random_sparse_dense(&mut rng, 12, 3);
            let a = SparseMatrix::from_nalgebra(&dense, None).unwrap();
            let sigma = dense.singular_values()[0];
            assert!(a.norm_bound() >= sigma - 1e-12);
        }
    }
}
