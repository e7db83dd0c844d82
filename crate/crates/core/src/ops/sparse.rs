use crate::error::{check_len, Error, Result};

/// Sparse real matrix stored in both compressed-row and compressed-column
/// form, so that `apply` and `apply_adjoint` are each a gather with a
/// fixed summation order.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    rows: usize,
    cols: usize,
    // CSR
    row_ptr: Vec<usize>,
    row_col: Vec<usize>,
    row_val: Vec<f64>,
    // CSC
    col_ptr: Vec<usize>,
    col_row: Vec<usize>,
    col_val: Vec<f64>,
}

impl SparseOperator {
    /// Builds an operator from `(row, col, weight)` triplets. Duplicate
    /// `(row, col)` pairs are rejected; entries that are exactly zero are
    /// dropped.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        mut triplets: Vec<(usize, usize, f64)>,
    ) -> Result<Self> {
        for &(r, c, w) in &triplets {
            if r >= rows || c >= cols {
                return Err(Error::invalid(format!(
                    "entry ({r}, {c}) outside a {rows}x{cols} operator"
                )));
            }
            if !w.is_finite() {
                return Err(Error::NonFinite("SparseOperator entries"));
            }
        }
        triplets.retain(|t| t.2 != 0.0);
        triplets.sort_by_key(|a| (a.0, a.1));
        if let Some(w) = triplets
            .windows(2)
            .find(|w| (w[0].0, w[0].1) == (w[1].0, w[1].1))
        {
            return Err(Error::invalid(format!(
                "duplicate entry at ({}, {})",
                w[0].0, w[0].1
            )));
        }

        let mut row_ptr = vec![0usize; rows + 1];
        for &(r, _, _) in &triplets {
            row_ptr[r + 1] += 1;
        }
        for i in 0..rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        let row_col: Vec<usize> = triplets.iter().map(|t| t.1).collect();
        let row_val: Vec<f64> = triplets.iter().map(|t| t.2).collect();

        let mut col_ptr = vec![0usize; cols + 1];
        for &(_, c, _) in &triplets {
            col_ptr[c + 1] += 1;
        }
        for j in 0..cols {
            col_ptr[j + 1] += col_ptr[j];
        }
        let mut next = col_ptr.clone();
        let nnz = triplets.len();
        let mut col_row = vec![0usize; nnz];
        let mut col_val = vec![0.0; nnz];
        // rows visited in increasing order, so each column stays row-sorted
        for &(r, c, w) in &triplets {
            let slot = next[c];
            col_row[slot] = r;
            col_val[slot] = w;
            next[c] += 1;
        }

        Ok(SparseOperator {
            rows,
            cols,
            row_ptr,
            row_col,
            row_val,
            col_ptr,
            col_row,
            col_val,
        })
    }

    /// Row-major dense matrix to sparse.
    pub fn from_dense(rows: usize, cols: usize, dense: &[f64]) -> Result<Self> {
        check_len("SparseOperator::from_dense", rows * cols, dense.len())?;
        let triplets = dense
            .iter()
            .enumerate()
            .filter(|(_, &v)| v != 0.0)
            .map(|(i, &v)| (i / cols, i % cols, v))
            .collect();
        Self::from_triplets(rows, cols, triplets)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, 1.0)).collect())
            .expect("identity is well formed")
    }

    pub fn zero(rows: usize, cols: usize) -> Self {
        Self::from_triplets(rows, cols, Vec::new()).expect("zero is well formed")
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_triplets(n, n, values.iter().enumerate().map(|(i, &v)| (i, i, v)).collect())
            .expect("diagonal is well formed")
    }

    /// Forward-difference gradient of a `width x height` row-major image,
    /// stacked as `[D_x; D_y]` (shape `2*w*h x w*h`). Differences across the
    /// last column/row are zero (Neumann boundary), so `||G x||^2` equals
    /// the squared norm of the pointwise gradient magnitude `|∇x|`.
    pub fn gradient_2d(width: usize, height: usize) -> Self {
        let n = width * height;
        let mut t = Vec::with_capacity(4 * n);
        for r in 0..height {
            for c in 0..width {
                let p = r * width + c;
                if c + 1 < width {
                    t.push((p, p, -1.0));
                    t.push((p, p + 1, 1.0));
                }
                if r + 1 < height {
                    t.push((n + p, p, -1.0));
                    t.push((n + p, p + width, 1.0));
                }
            }
        }
        Self::from_triplets(2 * n, n, t).expect("gradient is well formed")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.row_val.len()
    }

    /// `(col, weight)` pairs of one row.
    pub fn row(&self, r: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        self.row_col[span.clone()]
            .iter()
            .copied()
            .zip(self.row_val[span].iter().copied())
    }

    /// `(row, weight)` pairs of one column.
    pub fn col(&self, c: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.col_ptr[c]..self.col_ptr[c + 1];
        self.col_row[span.clone()]
            .iter()
            .copied()
            .zip(self.col_val[span].iter().copied())
    }

    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        (0..self.rows)
            .flat_map(|r| self.row(r).map(move |(c, w)| (r, c, w)))
            .collect()
    }

    /// `A x`
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len("apply", self.cols, x.len())?;
        let mut out = vec![0.0; self.rows];
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.row_val[k] * x[self.row_col[k]];
            }
            *o = acc;
        }
        Ok(out)
    }

    /// `A^T y`
    pub fn apply_adjoint(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len("apply_adjoint", self.rows, y.len())?;
        let mut out = vec![0.0; self.cols];
        for (c, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in self.col_ptr[c]..self.col_ptr[c + 1] {
                acc += self.col_val[k] * y[self.col_row[k]];
            }
            *o = acc;
        }
        Ok(out)
    }

    /// `A^T A x`
    pub fn apply_normal(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.apply_adjoint(&self.apply(x)?)
    }

    /// Sub-operator made of the listed rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Self> {
        let mut t = Vec::new();
        for (new_r, &r) in rows.iter().enumerate() {
            if r >= self.rows {
                return Err(Error::invalid(format!(
                    "row index {r} out of range ({} rows)",
                    self.rows
                )));
            }
            t.extend(self.row(r).map(|(c, w)| (new_r, c, w)));
        }
        Self::from_triplets(rows.len(), self.cols, t)
    }

    /// Row-major dense copy; intended for desk-scale checks.
    pub fn to_dense(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.rows * self.cols];
        for r in 0..self.rows {
            for (c, w) in self.row(r) {
                d[r * self.cols + c] = w;
            }
        }
        d
    }
}
