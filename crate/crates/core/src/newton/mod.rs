//! Newton systems of a primal-dual interior point step, as matrix-free
//! operators.
//!
//! For `min cᵀx, Ax = b, x ≥ 0` at an iterate `(x, y, s)` with `D² = X S⁻¹`
//! the Newton system is
//!
//! ```text
//! A Δx           = b − Ax                (primal row)
//! Aᵀ Δy + Δs     = c − Aᵀy − s           (dual row)
//! S Δx + X Δs    = βμ·1 − X S 1          (complementarity row)
//! ```
//!
//! Three reductions are built here: the normal equations `M = A D² Aᵀ`, the
//! basis-preconditioned normal equations `M̂ = D_B⁻¹ A_B⁻¹ M A_B⁻ᵀ D_B⁻¹`,
//! and the orthogonal subspace system `O = [−X Aᵀ  S V]` where the columns
//! of `V` span the null space of `A`.

mod ops;
mod recover;

pub use ops::{FbarOp, MnesOp, NesOp, NullSpaceOp, OssOp};
pub use recover::{
    newton_residuals, recover_updates_mnes, recover_updates_nes, recover_updates_oss,
    NewtonResiduals, NewtonStep, ResidualLocation,
};

use serde::{Deserialize, Serialize};

use crate::basis::BasisSelection;
use crate::error::{Error, Result};
use crate::lp::StandardLp;
use crate::operator::LinearOperator;
use crate::sparse::SparseMatrix;

/// Primal-dual point `(x, y, s)` with `x, s > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Iterate {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub s: Vec<f64>,
}

impl Iterate {
    /// `(1, 0, 1)`
    pub fn canonical(m: usize, n: usize) -> Iterate {
        Iterate { x: vec![1.0; n], y: vec![0.0; m], s: vec![1.0; n] }
    }

    pub fn new(x: Vec<f64>, y: Vec<f64>, s: Vec<f64>) -> Result<Iterate> {
        let it = Iterate { x, y, s };
        if it.x.len() != it.s.len() {
            return Err(Error::Dimension { what: "iterate s", expected: it.x.len(), got: it.s.len() });
        }
        it.check_positive()?;
        Ok(it)
    }

    fn check_positive(&self) -> Result<()> {
        for (which, v) in [("x", &self.x), ("s", &self.s)] {
            if let Some((index, &value)) = v.iter().enumerate().find(|(_, &e)| !(e > 0.0 && e.is_finite())) {
                return Err(Error::NotStrictlyPositive { which, index, value });
            }
        }
        Ok(())
    }

    /// Checks dimensions against an `m × n` problem and strict positivity.
    pub fn validate(&self, m: usize, n: usize) -> Result<()> {
        if self.x.len() != n {
            return Err(Error::Dimension { what: "iterate x", expected: n, got: self.x.len() });
        }
        if self.s.len() != n {
            return Err(Error::Dimension { what: "iterate s", expected: n, got: self.s.len() });
        }
        if self.y.len() != m {
            return Err(Error::Dimension { what: "iterate y", expected: m, got: self.y.len() });
        }
        self.check_positive()
    }

    /// `0.5 · xᵀs / n`
    pub fn default_beta_mu(&self) -> f64 {
        if self.x.is_empty() {
            return 0.0;
        }
        0.5 * dot(&self.x, &self.s) / self.x.len() as f64
    }

    /// Diagonal of `D² = X S⁻¹`.
    pub fn d2(&self) -> Vec<f64> {
        self.x.iter().zip(&self.s).map(|(x, s)| x / s).collect()
    }

    /// Diagonal of `D = (X S⁻¹)^½`.
    pub fn d(&self) -> Vec<f64> {
        self.x.iter().zip(&self.s).map(|(x, s)| (x / s).sqrt()).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorKind {
    Nes,
    Mnes,
    Oss,
    Fbar,
    NullSpace,
}

/// A Newton-system operator bundled with its right-hand side. `rhs` is empty
/// for the auxiliary operators `F̄` and `V`.
pub struct NewtonOperator<'a> {
    pub kind: OperatorKind,
    pub rhs: Vec<f64>,
    op: Box<dyn LinearOperator + 'a>,
}

impl<'a> NewtonOperator<'a> {
    pub fn inner(&self) -> &(dyn LinearOperator + 'a) {
        self.op.as_ref()
    }
}

impl LinearOperator for NewtonOperator<'_> {
    fn nrows(&self) -> usize {
        self.op.nrows()
    }

    fn ncols(&self) -> usize {
        self.op.ncols()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.op.apply(x, y)
    }

    fn apply_transpose(&self, x: &[f64], y: &mut [f64]) {
        self.op.apply_transpose(x, y)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_basis(std: &StandardLp, basis: &BasisSelection) -> Result<()> {
    if basis.m() != std.m() || basis.n() != std.n() {
        return Err(Error::Dimension { what: "basis", expected: std.n(), got: basis.n() });
    }
    Ok(())
}

/// `c − Aᵀy − s`
pub fn dual_residual(std: &StandardLp, it: &Iterate) -> Vec<f64> {
    let aty = std.a.mul_t_vec(&it.y);
    (0..std.n()).map(|j| std.c[j] - aty[j] - it.s[j]).collect()
}

/// Normal equations `M = A D² Aᵀ` with
/// `σ = A D² c − M y − βμ A S⁻¹ 1 + b − A x`.
pub fn build_nes<'a>(std: &'a StandardLp, it: &Iterate, beta_mu: f64) -> Result<NewtonOperator<'a>> {
    it.validate(std.m(), std.n())?;
    let op = NesOp::new(&std.a, it.d2());
    let a = &std.a;
    let ad2c = a.mul_vec(&op.d2.iter().zip(&std.c).map(|(d, c)| d * c).collect::<Vec<_>>());
    let my = op.apply_vec(&it.y);
    let as_inv = a.mul_vec(&it.s.iter().map(|s| 1.0 / s).collect::<Vec<_>>());
    let ax = a.mul_vec(&it.x);
    let rhs = (0..std.m())
        .map(|i| ad2c[i] - my[i] - beta_mu * as_inv[i] + std.b[i] - ax[i])
        .collect();
    Ok(NewtonOperator { kind: OperatorKind::Nes, rhs, op: Box::new(op) })
}

/// `σ̂ = D_B⁻¹ b̂ − βμ D_B⁻¹ Â S⁻¹ 1 + D_B⁻¹ Â D² (c − Aᵀy − s)` with
/// `b̂ = A_B⁻¹ b` and `Â v = A_B⁻¹ (A v)`.
pub fn mnes_rhs(std: &StandardLp, it: &Iterate, basis: &BasisSelection, beta_mu: f64) -> Vec<f64> {
    let d = it.d();
    let d2 = it.d2();
    let a = &std.a;
    let b_hat = basis.solve(&std.b);
    let s_inv: Vec<f64> = it.s.iter().map(|s| 1.0 / s).collect();
    let a_hat_s_inv = basis.solve(&a.mul_vec(&s_inv));
    let r_d = dual_residual(std, it);
    let a_hat_d2_rd = basis.solve(&a.mul_vec(&d2.iter().zip(&r_d).map(|(d, r)| d * r).collect::<Vec<_>>()));
    (0..std.m())
        .map(|k| {
            let db = d[basis.basic[k]];
            b_hat[k] / db - beta_mu * a_hat_s_inv[k] / db + a_hat_d2_rd[k] / db
        })
        .collect()
}

pub fn build_mnes<'a>(
    std: &'a StandardLp,
    it: &Iterate,
    basis: &'a BasisSelection,
    beta_mu: f64,
) -> Result<NewtonOperator<'a>> {
    it.validate(std.m(), std.n())?;
    check_basis(std, basis)?;
    let rhs = mnes_rhs(std, it, basis, beta_mu);
    let op = MnesOp::new(&std.a, basis, &it.d());
    Ok(NewtonOperator { kind: OperatorKind::Mnes, rhs, op: Box::new(op) })
}

/// `F̄ = D_B⁻¹ A_B⁻¹ A_N D_N`, shape `m × (n − m)`.
pub fn build_fbar<'a>(
    basis: &'a BasisSelection,
    a: &'a SparseMatrix,
    it: &Iterate,
) -> Result<NewtonOperator<'a>> {
    it.validate(a.n_rows(), a.n_cols())?;
    if basis.n() != a.n_cols() || basis.m() != a.n_rows() {
        return Err(Error::Dimension { what: "basis", expected: a.n_cols(), got: basis.n() });
    }
    let op = FbarOp::new(a, basis, &it.d());
    Ok(NewtonOperator { kind: OperatorKind::Fbar, rhs: Vec::new(), op: Box::new(op) })
}

/// `V` of shape `n × (n − m)`: rows of basic columns carry `A_B⁻¹ A_N`,
/// rows of nonbasic columns carry `−I`.
pub fn null_space_matrix<'a>(basis: &'a BasisSelection, a: &'a SparseMatrix) -> Result<NewtonOperator<'a>> {
    if basis.n() != a.n_cols() || basis.m() != a.n_rows() {
        return Err(Error::Dimension { what: "basis", expected: a.n_cols(), got: basis.n() });
    }
    let op = NullSpaceOp::new(a, basis);
    Ok(NewtonOperator { kind: OperatorKind::NullSpace, rhs: Vec::new(), op: Box::new(op) })
}

/// `O = [−X Aᵀ  S V]` with `τ = βμ 1 − X s`.
pub fn build_oss<'a>(
    std: &'a StandardLp,
    it: &Iterate,
    basis: &'a BasisSelection,
    beta_mu: f64,
) -> Result<NewtonOperator<'a>> {
    it.validate(std.m(), std.n())?;
    check_basis(std, basis)?;
    let rhs = it.x.iter().zip(&it.s).map(|(x, s)| beta_mu - x * s).collect();
    let op = OssOp::new(&std.a, basis, it.x.clone(), it.s.clone());
    Ok(NewtonOperator { kind: OperatorKind::Oss, rhs, op: Box::new(op) })
}
