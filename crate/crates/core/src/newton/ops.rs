//! Operator implementations behind the Newton-system builders.

use crate::basis::BasisSelection;
use crate::operator::LinearOperator;
use crate::sparse::SparseMatrix;

/// `v ↦ A (D² (Aᵀ v))`
pub struct NesOp<'a> {
    a: &'a SparseMatrix,
    pub(crate) d2: Vec<f64>,
}

impl<'a> NesOp<'a> {
    pub fn new(a: &'a SparseMatrix, d2: Vec<f64>) -> Self {
        NesOp { a, d2 }
    }
}

impl LinearOperator for NesOp<'_> {
    fn nrows(&self) -> usize {
        self.a.n_rows()
    }

    fn ncols(&self) -> usize {
        self.a.n_rows()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let mut t = self.a.mul_t_vec(x);
        t.iter_mut().zip(&self.d2).for_each(|(t, d)| *t *= d);
        self.a.mul_vec_into(&t, y);
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        self.apply(x, y)
    }
}

/// Shared pieces of the basis-dependent operators.
struct BasisParts<'a> {
    a: &'a SparseMatrix,
    basis: &'a BasisSelection,
}

impl BasisParts<'_> {
    /// `A_N v` for `v` indexed like the nonbasic columns.
    fn a_n(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.a.n_rows()];
        for (k, &j) in self.basis.nonbasic.iter().enumerate() {
            let vk = v[k];
            if vk == 0.0 {
                continue;
            }
            for (i, a) in self.a.col(j).iter() {
                out[i] += a * vk;
            }
        }
        out
    }

    /// `A_Nᵀ u`
    fn a_n_t(&self, u: &[f64]) -> Vec<f64> {
        self.basis.nonbasic.iter().map(|&j| self.a.col(j).dot(u)).collect()
    }
}

/// `v ↦ D_B⁻¹ A_B⁻¹ A_N D_N v`, shape `m × (n − m)`.
pub struct FbarOp<'a> {
    parts: BasisParts<'a>,
    d_b: Vec<f64>,
    d_n: Vec<f64>,
}

impl<'a> FbarOp<'a> {
    pub fn new(a: &'a SparseMatrix, basis: &'a BasisSelection, d: &[f64]) -> Self {
        let d_b = basis.basic.iter().map(|&j| d[j]).collect();
        let d_n = basis.nonbasic.iter().map(|&j| d[j]).collect();
        FbarOp { parts: BasisParts { a, basis }, d_b, d_n }
    }
}

impl LinearOperator for FbarOp<'_> {
    fn nrows(&self) -> usize {
        self.parts.basis.m()
    }

    fn ncols(&self) -> usize {
        self.parts.basis.nonbasic.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let scaled: Vec<f64> = x.iter().zip(&self.d_n).map(|(v, d)| v * d).collect();
        let u = self.parts.basis.solve(&self.parts.a_n(&scaled));
        for k in 0..y.len() {
            y[k] = u[k] / self.d_b[k];
        }
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        let t: Vec<f64> = x.iter().zip(&self.d_b).map(|(v, d)| v / d).collect();
        let w = self.parts.basis.solve_transpose(&t);
        let z = self.parts.a_n_t(&w);
        for k in 0..y.len() {
            y[k] = z[k] * self.d_n[k];
        }
    }
}

/// `v ↦ D_B⁻¹ A_B⁻¹ A D² Aᵀ A_B⁻ᵀ D_B⁻¹ v`
pub struct MnesOp<'a> {
    a: &'a SparseMatrix,
    basis: &'a BasisSelection,
    d_b: Vec<f64>,
    d2: Vec<f64>,
}

impl<'a> MnesOp<'a> {
    pub fn new(a: &'a SparseMatrix, basis: &'a BasisSelection, d: &[f64]) -> Self {
        let d_b = basis.basic.iter().map(|&j| d[j]).collect();
        let d2 = d.iter().map(|v| v * v).collect();
        MnesOp { a, basis, d_b, d2 }
    }
}

impl LinearOperator for MnesOp<'_> {
    fn nrows(&self) -> usize {
        self.basis.m()
    }

    fn ncols(&self) -> usize {
        self.basis.m()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        if self.basis.nonbasic.is_empty() {
            // A = A_B up to column order, so the chain collapses to I.
            y.copy_from_slice(x);
            return;
        }
        let t: Vec<f64> = x.iter().zip(&self.d_b).map(|(v, d)| v / d).collect();
        let w = self.basis.solve_transpose(&t);
        let mut z = self.a.mul_t_vec(&w);
        z.iter_mut().zip(&self.d2).for_each(|(z, d)| *z *= d);
        let u = self.basis.solve(&self.a.mul_vec(&z));
        for k in 0..y.len() {
            y[k] = u[k] / self.d_b[k];
        }
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        self.apply(x, y)
    }
}

/// `V = [A_B⁻¹ A_N ; −I]` with rows in original column order.
pub struct NullSpaceOp<'a> {
    parts: BasisParts<'a>,
}

impl<'a> NullSpaceOp<'a> {
    pub fn new(a: &'a SparseMatrix, basis: &'a BasisSelection) -> Self {
        NullSpaceOp { parts: BasisParts { a, basis } }
    }
}

impl LinearOperator for NullSpaceOp<'_> {
    fn nrows(&self) -> usize {
        self.parts.basis.n()
    }

    fn ncols(&self) -> usize {
        self.parts.basis.nonbasic.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let basis = self.parts.basis;
        if basis.nonbasic.is_empty() {
            y.iter_mut().for_each(|v| *v = 0.0);
            return;
        }
        let u = basis.solve(&self.parts.a_n(x));
        for (k, &j) in basis.basic.iter().enumerate() {
            y[j] = u[k];
        }
        for (k, &j) in basis.nonbasic.iter().enumerate() {
            y[j] = -x[k];
        }
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        let basis = self.parts.basis;
        if basis.nonbasic.is_empty() {
            return;
        }
        let x_b: Vec<f64> = basis.basic.iter().map(|&j| x[j]).collect();
        let w = basis.solve_transpose(&x_b);
        let z = self.parts.a_n_t(&w);
        for (k, &j) in basis.nonbasic.iter().enumerate() {
            y[k] = z[k] - x[j];
        }
    }
}

/// `(v_y, v_λ) ↦ −X Aᵀ v_y + S V v_λ`, square of order `n`.
pub struct OssOp<'a> {
    a: &'a SparseMatrix,
    v: NullSpaceOp<'a>,
    x: Vec<f64>,
    s: Vec<f64>,
}

impl<'a> OssOp<'a> {
    pub fn new(a: &'a SparseMatrix, basis: &'a BasisSelection, x: Vec<f64>, s: Vec<f64>) -> Self {
        OssOp { a, v: NullSpaceOp::new(a, basis), x, s }
    }
}

impl LinearOperator for OssOp<'_> {
    fn nrows(&self) -> usize {
        self.a.n_cols()
    }

    fn ncols(&self) -> usize {
        self.a.n_cols()
    }

    fn apply(&self, w: &[f64], y: &mut [f64]) {
        let m = self.a.n_rows();
        let aty = self.a.mul_t_vec(&w[..m]);
        let vl = self.v.apply_vec(&w[m..]);
        for j in 0..y.len() {
            y[j] = -self.x[j] * aty[j] + self.s[j] * vl[j];
        }
    }

    fn apply_transpose(&self, u: &[f64], y: &mut [f64]) {
        let m = self.a.n_rows();
        let xu: Vec<f64> = u.iter().zip(&self.x).map(|(u, x)| u * x).collect();
        let axu = self.a.mul_vec(&xu);
        for i in 0..m {
            y[i] = -axu[i];
        }
        let su: Vec<f64> = u.iter().zip(&self.s).map(|(u, s)| u * s).collect();
        self.v.apply_transpose(&su, &mut y[m..]);
    }
}
