//! Recovery of `(Δx, Δy, Δs)` from (possibly inexact) reduced solutions.

use serde::{Deserialize, Serialize};

use super::{dual_residual, Iterate};
use crate::basis::BasisSelection;
use crate::error::{Error, Result};
use crate::lp::StandardLp;
use crate::operator::LinearOperator;
use crate::newton::NullSpaceOp;

/// Row of the Newton system that absorbs the error of an inexact solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ResidualLocation {
    PrimalRow,
    ComplementarityRow,
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NewtonStep {
    pub dx: Vec<f64>,
    pub dy: Vec<f64>,
    pub ds: Vec<f64>,
    pub residual_location: ResidualLocation,
}

/// Residual of each Newton row for a step.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonResiduals {
    /// `A Δx − (b − Ax)`
    pub primal: Vec<f64>,
    /// `Aᵀ Δy + Δs − (c − Aᵀy − s)`
    pub dual: Vec<f64>,
    /// `S Δx + X Δs − (βμ 1 − X s)`
    pub complementarity: Vec<f64>,
}

pub fn newton_residuals(std: &StandardLp, it: &Iterate, beta_mu: f64, step: &NewtonStep) -> NewtonResiduals {
    let a = &std.a;
    let adx = a.mul_vec(&step.dx);
    let ax = a.mul_vec(&it.x);
    let primal = (0..std.m()).map(|i| adx[i] - (std.b[i] - ax[i])).collect();
    let atdy = a.mul_t_vec(&step.dy);
    let rd = dual_residual(std, it);
    let dual = (0..std.n()).map(|j| atdy[j] + step.ds[j] - rd[j]).collect();
    let complementarity = (0..std.n())
        .map(|j| {
            it.s[j] * step.dx[j] + it.x[j] * step.ds[j] - (beta_mu - it.x[j] * it.s[j])
        })
        .collect();
    NewtonResiduals { primal, dual, complementarity }
}

fn check_len(what: &'static str, v: &[f64], expected: usize) -> Result<()> {
    if v.len() != expected {
        return Err(Error::Dimension { what, expected, got: v.len() });
    }
    Ok(())
}

/// `Δs = c − Aᵀy − s − AᵀΔy`, `Δx = βμ S⁻¹ 1 − x − D² Δs`
fn complete_from_dy(std: &StandardLp, it: &Iterate, beta_mu: f64, dy: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let rd = dual_residual(std, it);
    let atdy = std.a.mul_t_vec(dy);
    let ds: Vec<f64> = (0..std.n()).map(|j| rd[j] - atdy[j]).collect();
    let dx = (0..std.n())
        .map(|j| beta_mu / it.s[j] - it.x[j] - it.x[j] / it.s[j] * ds[j])
        .collect();
    (dx, ds)
}

/// Completes a normal-equations solution; the solve error lands in the primal row.
pub fn recover_updates_nes(std: &StandardLp, it: &Iterate, beta_mu: f64, dy_tilde: &[f64]) -> Result<NewtonStep> {
    it.validate(std.m(), std.n())?;
    check_len("dy_tilde", dy_tilde, std.m())?;
    let (dx, ds) = complete_from_dy(std, it, beta_mu, dy_tilde);
    Ok(NewtonStep { dx, dy: dy_tilde.to_vec(), ds, residual_location: ResidualLocation::PrimalRow })
}

/// Completes a modified-normal-equations solution `z̃` with residual
/// `r̂ = σ̂ − M̂ z̃`.
///
/// `Δy = A_B⁻ᵀ D_B⁻¹ z̃` and `Δx = βμ S⁻¹ 1 − x − D² Δs + v`, where `v` holds
/// `D_B r̂` at the basic positions. Since `A v = A_B D_B r̂` cancels the solve
/// error exactly, the primal and dual rows hold and the complementarity row
/// carries `S v`.
pub fn recover_updates_mnes(
    std: &StandardLp,
    it: &Iterate,
    basis: &BasisSelection,
    beta_mu: f64,
    z_tilde: &[f64],
    r_hat: &[f64],
) -> Result<NewtonStep> {
    it.validate(std.m(), std.n())?;
    check_len("z_tilde", z_tilde, std.m())?;
    check_len("r_hat", r_hat, std.m())?;
    let d = it.d();
    let t: Vec<f64> = (0..std.m()).map(|k| z_tilde[k] / d[basis.basic[k]]).collect();
    let dy = basis.solve_transpose(&t);
    let (mut dx, ds) = complete_from_dy(std, it, beta_mu, &dy);
    for (k, &j) in basis.basic.iter().enumerate() {
        dx[j] += d[j] * r_hat[k];
    }
    Ok(NewtonStep { dx, dy, ds, residual_location: ResidualLocation::ComplementarityRow })
}

/// Completes an orthogonal-subspace solution `w̃ = (Δy, λ)`:
/// `Δs = −AᵀΔy` and `Δx = V λ`.
pub fn recover_updates_oss(std: &StandardLp, basis: &BasisSelection, w_tilde: &[f64]) -> Result<NewtonStep> {
    check_len("w_tilde", w_tilde, std.n())?;
    let m = std.m();
    let dy = w_tilde[..m].to_vec();
    let ds = std.a.mul_t_vec(&dy).into_iter().map(|v| -v).collect();
    let dx = NullSpaceOp::new(&std.a, basis).apply_vec(&w_tilde[m..]);
    Ok(NewtonStep { dx, dy, ds, residual_location: ResidualLocation::ComplementarityRow })
}
