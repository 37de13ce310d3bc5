//! Infeasible-start primal-dual path-following IPM with exact normal
//! equations solves.

use std::time::Instant;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use super::{SolveOutcome, SolveStatus, SolverKind};
use crate::lp::{ColumnProvenance, StandardLp};
use crate::newton::{build_nes, recover_updates_nes, Iterate, NesOp, NewtonStep};
use crate::operator::LinearOperator;

/// Largest `m` for which the normal equations are factorized densely.
pub const DENSE_NES_MAX_ROWS: usize = 2000;

/// Consecutive duality-gap increases treated as divergence.
const DIVERGENCE_WINDOW: usize = 10;

/// Refinement passes of `Δy` against the primal Newton row.
const REFINEMENT_STEPS: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IpmConfig {
    /// Target average complementarity `μ`.
    pub mu_target: f64,
    /// Centering parameter `β`.
    pub beta: f64,
    pub max_iterations: u64,
    /// Fraction of the distance to the boundary taken per step.
    pub step_fraction: f64,
    pub residual_tol: f64,
}

impl Default for IpmConfig {
    fn default() -> Self {
        IpmConfig { mu_target: 1e-8, beta: 0.1, max_iterations: 200, step_fraction: 0.99995, residual_tol: 1e-8 }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Largest `α` with `v + α dv ≥ 0` (infinite when `dv ≥ 0`).
fn max_step(v: &[f64], dv: &[f64]) -> f64 {
    v.iter()
        .zip(dv)
        .filter(|(_, d)| **d < 0.0)
        .map(|(v, d)| -v / d)
        .fold(f64::INFINITY, f64::min)
}

/// `A D² Aᵀ` assembled from column outer products.
fn assemble_nes(std: &StandardLp, d2: &[f64]) -> DMatrix<f64> {
    let m = std.m();
    let mut out = DMatrix::zeros(m, m);
    for (j, &dj) in d2.iter().enumerate() {
        let col = std.a.col(j);
        for (i, ai) in col.iter() {
            for (k, ak) in col.iter() {
                out[(i, k)] += dj * ai * ak;
            }
        }
    }
    out
}

/// Dense Cholesky factor, retried once with a tiny diagonal shift.
fn factor_dense(m: DMatrix<f64>) -> Option<Cholesky<f64, Dyn>> {
    let k = m.nrows();
    if let Some(ch) = m.clone().cholesky() {
        return Some(ch);
    }
    let shift = 1e-12 * m.diagonal().amax().max(f64::MIN_POSITIVE);
    (m + DMatrix::identity(k, k) * shift).cholesky()
}

/// Jacobi-preconditioned conjugate gradients on `A D² Aᵀ`.
fn solve_cg(std: &StandardLp, d2: &[f64], rhs: &[f64]) -> Option<Vec<f64>> {
    let m = std.m();
    let op = NesOp::new(&std.a, d2.to_vec());
    let diag: Vec<f64> = (0..m)
        .map(|i| std.a.row(i).iter().map(|(j, a)| d2[j] * a * a).sum::<f64>())
        .collect();
    if diag.iter().any(|d| !(*d > 0.0)) {
        return None;
    }
    let mut x = vec![0.0; m];
    let mut r = rhs.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let target = 1e-12 * norm(rhs).max(f64::MIN_POSITIVE);
    let mut q = vec![0.0; m];
    for _ in 0..10 * m.max(10) {
        if norm(&r) <= target {
            return Some(x);
        }
        op.apply(&p, &mut q);
        let pq = dot(&p, &q);
        if !(pq > 0.0) {
            return None;
        }
        let alpha = rz / pq;
        for i in 0..m {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        z = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..m {
            p[i] = z[i] + beta * p[i];
        }
    }
    (norm(&r) <= 1e-8 * norm(rhs)).then_some(x)
}

enum NesSolver<'a> {
    Dense(Cholesky<f64, Dyn>),
    Cg { std: &'a StandardLp, d2: Vec<f64> },
}

impl NesSolver<'_> {
    fn solve(&self, rhs: &[f64]) -> Option<Vec<f64>> {
        match self {
            NesSolver::Dense(ch) => Some(ch.solve(&DVector::from_column_slice(rhs)).as_slice().to_vec()),
            NesSolver::Cg { std, d2 } => solve_cg(std, d2, rhs),
        }
    }
}

/// Column pairs `(x⁺, x⁻)` of split free variables.
fn split_pairs(std: &StandardLp) -> Vec<(usize, usize)> {
    let mut neg = std::collections::HashMap::new();
    for (j, p) in std.provenance.iter().enumerate() {
        if let ColumnProvenance::FreeNeg(k) = p {
            neg.insert(*k, j);
        }
    }
    std.provenance
        .iter()
        .enumerate()
        .filter_map(|(j, p)| match p {
            ColumnProvenance::FreePos(k) => neg.get(k).map(|&q| (j, q)),
            _ => None,
        })
        .collect()
}

/// Lowers both halves of each split pair so the smaller one is at most
/// `1 + |x⁺ − x⁻|`.
fn recenter_splits(x: &mut [f64], pairs: &[(usize, usize)]) {
    for &(p, q) in pairs {
        let shift = x[p].min(x[q]) - 1.0 - (x[p] - x[q]).abs();
        if shift > 0.0 {
            x[p] -= shift;
            x[q] -= shift;
        }
    }
}

/// Solves the normal equations, then refines `Δy` until `A Δx` matches the
/// primal residual.
fn refined_step(
    std: &StandardLp,
    it: &Iterate,
    beta_mu: f64,
    rhs: &[f64],
    rp: &[f64],
    solver: &NesSolver,
) -> Result<NewtonStep, String> {
    let breakdown = || "normal equations solve broke down".to_string();
    let mut dy = solver.solve(rhs).ok_or_else(breakdown)?;
    let mut step = recover_updates_nes(std, it, beta_mu, &dy).map_err(|e| e.to_string())?;
    let target = 1e-15 * (1.0 + norm(rp));
    for _ in 0..REFINEMENT_STEPS {
        let adx = std.a.mul_vec(&step.dx);
        let e: Vec<f64> = adx.iter().zip(rp).map(|(a, r)| a - r).collect();
        if norm(&e) <= target {
            break;
        }
        let corr = solver.solve(&e).ok_or_else(breakdown)?;
        dy.iter_mut().zip(&corr).for_each(|(d, c)| *d -= c);
        step = recover_updates_nes(std, it, beta_mu, &dy).map_err(|e| e.to_string())?;
    }
    if step.dx.iter().chain(&step.dy).chain(&step.ds).any(|v| !v.is_finite()) {
        return Err(breakdown());
    }
    Ok(step)
}

/// Runs the IPM from `(x, y, s) = (1, 0, 1)` with centering `βμ` per step.
pub fn solve_internal_ipm(std: &StandardLp, cfg: &IpmConfig) -> SolveOutcome {
    let start = Instant::now();
    if !(cfg.beta > 0.0 && cfg.beta < 1.0 && cfg.step_fraction > 0.0 && cfg.step_fraction < 1.0) {
        return SolveOutcome::failed(SolverKind::InternalIpm, "beta and step_fraction must lie in (0, 1)");
    }
    let (m, n) = (std.m(), std.n());
    let finish = |status, objective: Option<f64>, iterations, message: Option<String>| SolveOutcome {
        status,
        objective,
        iterations,
        wall_time_s: start.elapsed().as_secs_f64(),
        solver: SolverKind::InternalIpm,
        serialization_time_s: None,
        message,
        output: None,
    };
    if n == 0 {
        return finish(SolveStatus::Error, None, 0, Some("no columns".into()));
    }
    let mut it = Iterate::canonical(m, n);
    let pairs = split_pairs(std);
    let b_scale = 1.0 + norm(&std.b);
    let c_scale = 1.0 + norm(&std.c);
    let mut prev_gap = f64::INFINITY;
    let mut increases = 0;
    for iter in 0..=cfg.max_iterations {
        debug_assert!(it.x.iter().chain(&it.s).all(|v| *v > 0.0), "iterate left the interior");
        let gap = dot(&it.x, &it.s);
        let ax = std.a.mul_vec(&it.x);
        let rp: Vec<f64> = std.b.iter().zip(&ax).map(|(b, v)| b - v).collect();
        let aty = std.a.mul_t_vec(&it.y);
        let rd: Vec<f64> = (0..n).map(|j| std.c[j] - aty[j] - it.s[j]).collect();
        log::debug!("ipm iter {iter}: gap {gap:.3e} primal {:.3e} dual {:.3e}", norm(&rp), norm(&rd));
        if !gap.is_finite() {
            return finish(SolveStatus::Error, None, iter, Some("non-finite duality gap".into()));
        }
        if gap <= n as f64 * cfg.mu_target
            && norm(&rp) <= cfg.residual_tol * b_scale
            && norm(&rd) <= cfg.residual_tol * c_scale
        {
            let obj = std.reported_objective(dot(&std.c, &it.x));
            return finish(SolveStatus::Optimal, Some(obj), iter, None);
        }
        if iter == cfg.max_iterations {
            break;
        }
        if gap > prev_gap {
            increases += 1;
            if increases >= DIVERGENCE_WINDOW {
                return finish(SolveStatus::Error, None, iter, Some("duality gap diverging".into()));
            }
        } else {
            increases = 0;
        }
        prev_gap = gap;

        let beta_mu = cfg.beta * gap / n as f64;
        let nes = match build_nes(std, &it, beta_mu) {
            Ok(op) => op,
            Err(e) => return finish(SolveStatus::Error, None, iter, Some(e.to_string())),
        };
        let d2 = it.d2();
        let solver = if m <= DENSE_NES_MAX_ROWS {
            factor_dense(assemble_nes(std, &d2)).map(NesSolver::Dense)
        } else {
            Some(NesSolver::Cg { std, d2 })
        };
        let Some(solver) = solver else {
            return finish(SolveStatus::Error, None, iter, Some("normal equations factorization failed".into()));
        };
        let step = match refined_step(std, &it, beta_mu, &nes.rhs, &rp, &solver) {
            Ok(step) => step,
            Err(msg) => return finish(SolveStatus::Error, None, iter, Some(msg)),
        };
        let alpha = (cfg.step_fraction * max_step(&it.x, &step.dx).min(max_step(&it.s, &step.ds))).min(1.0);
        for j in 0..n {
            it.x[j] += alpha * step.dx[j];
            it.s[j] += alpha * step.ds[j];
        }
        for i in 0..m {
            it.y[i] += alpha * step.dy[i];
        }
        recenter_splits(&mut it.x, &pairs);
    }
    finish(SolveStatus::IterationLimit, None, cfg.max_iterations, Some("iteration limit reached".into()))
}
