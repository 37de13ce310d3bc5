//! Matrix-free linear operators.

use nalgebra::DMatrix;

/// A real linear map `ℝ^ncols → ℝ^nrows` exposing products with the matrix
/// and its transpose.
pub trait LinearOperator: Send + Sync {
    fn nrows(&self) -> usize;
    fn ncols(&self) -> usize;
    /// `y = op · x`
    fn apply(&self, x: &[f64], y: &mut [f64]);
    /// `y = opᵀ · x`
    fn apply_transpose(&self, x: &[f64], y: &mut [f64]);

    fn apply_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.nrows()];
        self.apply(x, &mut y);
        y
    }

    fn apply_transpose_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.ncols()];
        self.apply_transpose(x, &mut y);
        y
    }
}

/// Assembles the dense matrix of `op` column by column.
pub fn assemble_dense(op: &dyn LinearOperator) -> DMatrix<f64> {
    let (r, c) = (op.nrows(), op.ncols());
    let mut out = DMatrix::zeros(r, c);
    let mut e = vec![0.0; c];
    let mut y = vec![0.0; r];
    for j in 0..c {
        e[j] = 1.0;
        op.apply(&e, &mut y);
        out.column_mut(j).copy_from_slice(&y);
        e[j] = 0.0;
    }
    out
}

#[derive(Debug, Clone)]
pub struct DenseOperator(pub DMatrix<f64>);

impl LinearOperator for DenseOperator {
    fn nrows(&self) -> usize {
        self.0.nrows()
    }

    fn ncols(&self) -> usize {
        self.0.ncols()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let (r, c) = self.0.shape();
        y.iter_mut().for_each(|v| *v = 0.0);
        for j in 0..c {
            let xj = x[j];
            if xj == 0.0 {
                continue;
            }
            let col = self.0.column(j);
            for i in 0..r {
                y[i] += col[i] * xj;
            }
        }
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        for (j, yj) in y.iter_mut().enumerate() {
            *yj = self.0.column(j).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }
}

/// Identity on `ℝ^n`.
#[derive(Debug, Clone, Copy)]
pub struct IdentityOperator(pub usize);

impl LinearOperator for IdentityOperator {
    fn nrows(&self) -> usize {
        self.0
    }

    fn ncols(&self) -> usize {
        self.0
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(x);
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(x);
    }
}

/// View of `opᵀ` as an operator.
pub struct Transposed<'a>(pub &'a dyn LinearOperator);

impl LinearOperator for Transposed<'_> {
    fn nrows(&self) -> usize {
        self.0.ncols()
    }

    fn ncols(&self) -> usize {
        self.0.nrows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.0.apply_transpose(x, y)
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        self.0.apply(x, y)
    }
}
