//! Basis selection by column-pivoted QR.
//!
//! Columns are orthogonalized with classical Gram-Schmidt applied twice
//! against the accepted columns. Each step pivots on the column with the
//! largest remaining residual norm, lowest index on ties. Residual norms are
//! downdated and recomputed once the downdate loses too many digits.
//!
//! The retained factors give `A_B = Q R` with `Q` orthogonal and `R` upper
//! triangular, which serves both `A_B u = v` and `A_Bᵀ u = v` without ever
//! forming an inverse.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

/// Default row limit for the dense orthogonal factor.
pub const DEFAULT_MAX_DENSE_ROWS: usize = 4000;

/// Relative size of the last accepted pivot below which the matrix is rank deficient.
pub const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Position {
    Basic(usize),
    Nonbasic(usize),
}

#[derive(Debug, Clone)]
pub struct BasisSelection {
    /// Basic columns in pivot order.
    pub basic: Vec<usize>,
    /// Nonbasic columns in ascending order.
    pub nonbasic: Vec<usize>,
    position: Vec<Position>,
    q: DMatrix<f64>,
    r: DMatrix<f64>,
}

impl BasisSelection {
    pub fn m(&self) -> usize {
        self.basic.len()
    }

    pub fn n(&self) -> usize {
        self.position.len()
    }

    pub fn position(&self, col: usize) -> Position {
        self.position[col]
    }

    /// Solves `A_B u = v`.
    pub fn solve(&self, v: &[f64]) -> Vec<f64> {
        let mut u = self.q.tr_mul(&DVector::from_column_slice(v));
        let ok = self.r.solve_upper_triangular_mut(&mut u);
        debug_assert!(ok);
        u.data.into()
    }

    /// Solves `A_Bᵀ u = v`.
    pub fn solve_transpose(&self, v: &[f64]) -> Vec<f64> {
        let mut w = DVector::from_column_slice(v);
        let ok = self.r.tr_solve_upper_triangular_mut(&mut w);
        debug_assert!(ok);
        (&self.q * w).data.into()
    }

    /// Smallest and largest absolute diagonal entries of `R`.
    pub fn r_diagonal_range(&self) -> (f64, f64) {
        let d = self.r.diagonal();
        let lo = d.iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
        let hi = d.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        (lo, hi)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `v ← v − Q_k (Q_kᵀ v)` applied twice; returns the accumulated coefficients.
fn cgs2(q: &DMatrix<f64>, k: usize, v: &mut [f64]) -> Vec<f64> {
    let m = v.len();
    let mut coeffs = vec![0.0; k];
    for _ in 0..2 {
        let h: Vec<f64> = (0..k).map(|i| dot(q.column(i).as_slice(), v)).collect();
        for (i, &hi) in h.iter().enumerate() {
            let qi = q.column(i);
            for r in 0..m {
                v[r] -= hi * qi[r];
            }
            coeffs[i] += hi;
        }
    }
    coeffs
}

pub fn select_basis(a: &SparseMatrix) -> Result<BasisSelection> {
    select_basis_limited(a, DEFAULT_MAX_DENSE_ROWS)
}

pub fn select_basis_limited(a: &SparseMatrix, max_rows: usize) -> Result<BasisSelection> {
    let m = a.n_rows();
    let n = a.n_cols();
    if m > n {
        return Err(Error::RankDeficient { rows: m, deficient_rows: m - n });
    }
    if m > max_rows {
        return Err(Error::Limit(format!(
            "basis factorization needs a dense {m}x{m} factor (limit {max_rows} rows)"
        )));
    }
    let orig2: Vec<f64> =
        (0..n).map(|j| a.col(j).values.iter().map(|v| v * v).sum()).collect();
    let max_norm = orig2.iter().fold(0.0f64, |acc, v| acc.max(*v)).sqrt();
    let mut res2 = orig2.clone();
    let mut ref2 = orig2.clone();
    let mut alive: Vec<bool> = orig2.iter().map(|&v| v > 0.0).collect();
    let mut chosen = vec![false; n];

    let mut q = DMatrix::<f64>::zeros(m, m);
    let mut r = DMatrix::<f64>::zeros(m, m);
    let mut basic = Vec::with_capacity(m);
    let mut dense_col = vec![0.0; m];

    for k in 0..m {
        let mut best: Option<(usize, f64)> = None;
        for j in 0..n {
            if chosen[j] || !alive[j] {
                continue;
            }
            if best.is_none_or(|(_, b)| res2[j] > b) {
                best = Some((j, res2[j]));
            }
        }
        let Some((j, _)) = best else {
            return Err(Error::RankDeficient { rows: m, deficient_rows: m - k });
        };

        dense_col.iter_mut().for_each(|v| *v = 0.0);
        for (i, v) in a.col(j).iter() {
            dense_col[i] = v;
        }
        let coeffs = cgs2(&q, k, &mut dense_col);
        let norm = dense_col.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm <= RANK_TOL * max_norm {
            return Err(Error::RankDeficient { rows: m, deficient_rows: m - k });
        }
        for (i, c) in coeffs.into_iter().enumerate() {
            r[(i, k)] = c;
        }
        r[(k, k)] = norm;
        for i in 0..m {
            q[(i, k)] = dense_col[i] / norm;
        }
        chosen[j] = true;
        basic.push(j);

        let qk = q.column(k);
        let t = a.mul_t_vec(qk.as_slice());
        for jj in 0..n {
            if chosen[jj] || !alive[jj] {
                continue;
            }
            res2[jj] -= t[jj] * t[jj];
            if res2[jj] < 1e-8 * ref2[jj] {
                dense_col.iter_mut().for_each(|v| *v = 0.0);
                for (i, v) in a.col(jj).iter() {
                    dense_col[i] = v;
                }
                cgs2(&q, k + 1, &mut dense_col);
                let fresh = dense_col.iter().map(|v| v * v).sum::<f64>();
                if fresh <= (f64::EPSILON * f64::EPSILON) * orig2[jj] {
                    alive[jj] = false;
                }
                res2[jj] = fresh;
                ref2[jj] = fresh;
            }
        }
    }

    let mut position = vec![Position::Nonbasic(0); n];
    for (k, &j) in basic.iter().enumerate() {
        position[j] = Position::Basic(k);
    }
    let nonbasic: Vec<usize> = (0..n).filter(|&j| !chosen[j]).collect();
    for (k, &j) in nonbasic.iter().enumerate() {
        position[j] = Position::Nonbasic(k);
    }
    Ok(BasisSelection { basic, nonbasic, position, q, r })
}
