//! Compressed sparse matrix holding both column- and row-major views.
//!
//! Construction canonicalizes the input: duplicate coordinates are summed and
//! entries that end up exactly zero are dropped, so `nnz` is always the number
//! of structurally nonzero entries.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseMatrix {
    n_rows: usize,
    n_cols: usize,
    col_ptr: Vec<usize>,
    row_idx: Vec<usize>,
    col_val: Vec<f64>,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    row_val: Vec<f64>,
}

/// Borrowed view of one row or column.
#[derive(Debug, Clone, Copy)]
pub struct SparseVec<'a> {
    pub indices: &'a [usize],
    pub values: &'a [f64],
}

impl<'a> SparseVec<'a> {
    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + 'a {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn dot(&self, dense: &[f64]) -> f64 {
        self.iter().map(|(i, v)| v * dense[i]).sum()
    }

    pub fn norm_inf(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

impl SparseMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        SparseMatrix {
            n_rows,
            n_cols,
            col_ptr: vec![0; n_cols + 1],
            row_idx: Vec::new(),
            col_val: Vec::new(),
            row_ptr: vec![0; n_rows + 1],
            col_idx: Vec::new(),
            row_val: Vec::new(),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, 1.0))).expect("identity is valid")
    }

    /// Builds a matrix from `(row, col, value)` triplets.
    pub fn from_triplets<I>(n_rows: usize, n_cols: usize, triplets: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let mut entries: Vec<(usize, usize, f64)> = Vec::new();
        for (r, c, v) in triplets {
            if r >= n_rows || c >= n_cols {
                return Err(Error::Sparse(format!(
                    "entry ({r}, {c}) outside {n_rows}x{n_cols}"
                )));
            }
            if !v.is_finite() {
                return Err(Error::Sparse(format!("non-finite value {v} at ({r}, {c})")));
            }
            entries.push((c, r, v));
        }
        // Stable sort keeps the summation order of duplicates equal to input order.
        entries.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));

        let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(entries.len());
        for (c, r, v) in entries {
            match merged.last_mut() {
                Some(last) if last.0 == c && last.1 == r => last.2 += v,
                _ => merged.push((c, r, v)),
            }
        }
        merged.retain(|e| e.2 != 0.0);

        let mut col_ptr = vec![0usize; n_cols + 1];
        let mut row_idx = Vec::with_capacity(merged.len());
        let mut col_val = Vec::with_capacity(merged.len());
        for &(c, r, v) in &merged {
            col_ptr[c + 1] += 1;
            row_idx.push(r);
            col_val.push(v);
        }
        for j in 0..n_cols {
            col_ptr[j + 1] += col_ptr[j];
        }

        let mut row_ptr = vec![0usize; n_rows + 1];
        for &(_, r, _) in &merged {
            row_ptr[r + 1] += 1;
        }
        for i in 0..n_rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        let mut next = row_ptr.clone();
        let mut col_idx = vec![0usize; merged.len()];
        let mut row_val = vec![0.0; merged.len()];
        // Column-major traversal yields ascending column indices within each row.
        for &(c, r, v) in &merged {
            let k = next[r];
            col_idx[k] = c;
            row_val[k] = v;
            next[r] += 1;
        }

        Ok(SparseMatrix {
            n_rows,
            n_cols,
            col_ptr,
            row_idx,
            col_val,
            row_ptr,
            col_idx,
            row_val,
        })
    }

    pub fn from_dense(dense: &DMatrix<f64>) -> Self {
        let mut t = Vec::new();
        for j in 0..dense.ncols() {
            for i in 0..dense.nrows() {
                let v = dense[(i, j)];
                if v != 0.0 {
                    t.push((i, j, v));
                }
            }
        }
        Self::from_triplets(dense.nrows(), dense.ncols(), t).expect("dense input is in bounds")
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.col_val.len()
    }

    pub fn col(&self, j: usize) -> SparseVec<'_> {
        let (a, b) = (self.col_ptr[j], self.col_ptr[j + 1]);
        SparseVec {
            indices: &self.row_idx[a..b],
            values: &self.col_val[a..b],
        }
    }

    pub fn row(&self, i: usize) -> SparseVec<'_> {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        SparseVec {
            indices: &self.col_idx[a..b],
            values: &self.row_val[a..b],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let col = self.col(j);
        match col.indices.binary_search(&i) {
            Ok(k) => col.values[k],
            Err(_) => 0.0,
        }
    }

    /// Triplets in column-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n_cols).flat_map(move |j| self.col(j).iter().map(move |(i, v)| (i, j, v)))
    }

    /// `y = A x`
    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n_cols);
        assert_eq!(y.len(), self.n_rows);
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).dot(x);
        }
    }

    /// `y = Aᵀ x`
    pub fn mul_t_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n_rows);
        assert_eq!(y.len(), self.n_cols);
        for (j, yj) in y.iter_mut().enumerate() {
            *yj = self.col(j).dot(x);
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n_rows];
        self.mul_vec_into(x, &mut y);
        y
    }

    pub fn mul_t_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n_cols];
        self.mul_t_vec_into(x, &mut y);
        y
    }

    pub fn transpose(&self) -> SparseMatrix {
        Self::from_triplets(
            self.n_cols,
            self.n_rows,
            self.triplets().map(|(i, j, v)| (j, i, v)),
        )
        .expect("transpose preserves bounds")
    }

    pub fn select_columns(&self, cols: &[usize]) -> SparseMatrix {
        let t = cols
            .iter()
            .enumerate()
            .flat_map(|(k, &j)| self.col(j).iter().map(move |(i, v)| (i, k, v)))
            .collect::<Vec<_>>();
        Self::from_triplets(self.n_rows, cols.len(), t).expect("selection preserves bounds")
    }

    pub fn select_rows(&self, rows: &[usize]) -> SparseMatrix {
        let t = rows
            .iter()
            .enumerate()
            .flat_map(|(k, &i)| self.row(i).iter().map(move |(j, v)| (k, j, v)))
            .collect::<Vec<_>>();
        Self::from_triplets(rows.len(), self.n_cols, t).expect("selection preserves bounds")
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut d = DMatrix::zeros(self.n_rows, self.n_cols);
        for (i, j, v) in self.triplets() {
            d[(i, j)] = v;
        }
        d
    }

    pub fn max_row_nnz(&self) -> usize {
        (0..self.n_rows).map(|i| self.row(i).nnz()).max().unwrap_or(0)
    }

    pub fn max_col_nnz(&self) -> usize {
        (0..self.n_cols).map(|j| self.col(j).nnz()).max().unwrap_or(0)
    }
}
