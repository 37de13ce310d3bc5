//! Certified one-sided estimates of extreme singular values.
//!
//! Both estimators run Golub-Kahan-Lanczos bidiagonalization with full
//! reorthogonalization on the tall orientation of the operator (the
//! transpose is used when the operator is wide). Every unit vector `w` of
//! the working domain satisfies `σ_min ≤ ‖op w‖ ≤ σ_max`. The value
//! reported for a Ritz vector is always the directly measured ratio
//! `‖op y‖ / ‖y‖`, widened by a rounding guard of `64·u·dim` (relative,
//! plus an absolute term scaled by the largest observed norm for `σ_min`).

pub mod sparsity;

use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::LinearOperator;

pub use sparsity::{sparsity_mnes, sparsity_oss, SparsityMeasure, SparsityRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaMinMethod {
    Iterative,
    RandomSampling,
    RankDeficiencyExact,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralConfig {
    /// Iteration cap for the largest singular value.
    pub max_iters: usize,
    /// Relative change of the top Ritz value that stops the iteration.
    pub tol: f64,
    /// Krylov dimension cap for the iterative smallest singular value.
    pub min_max_iters: usize,
    /// Ritz residual, relative to the largest Ritz value, accepted as converged.
    pub min_residual_tol: f64,
    /// Wall-clock budget of the iterative smallest-singular-value stage.
    pub timeout: Duration,
    /// Random unit vectors used by the fallback.
    pub n_samples: usize,
    pub seed: u64,
    /// Skip the iterative stage and go straight to sampling.
    pub force_sampling: bool,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        SpectralConfig {
            max_iters: 300,
            tol: 1e-8,
            min_max_iters: 300,
            min_residual_tol: 1e-6,
            timeout: Duration::from_secs(60),
            n_samples: 10_000,
            seed: 0,
            force_sampling: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaMax {
    /// Certified lower bound on `σ_max`.
    pub lower: f64,
    /// Measured `‖op y‖/‖y‖` before the rounding guard.
    pub raw: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaMin {
    /// Certified upper bound on `σ_min`.
    pub upper: f64,
    /// Measured `min ‖op w‖/‖w‖` before the rounding guard.
    pub raw: f64,
    /// Rounding floor `64·u·dim·scale`; a raw value at or below it is
    /// indistinguishable from zero.
    pub noise_floor: f64,
    pub method: SigmaMinMethod,
    pub iterations: usize,
    pub samples: usize,
}

/// The operator in tall orientation: `fwd: ℝ^q → ℝ^p` with `p ≥ q`.
struct Tall<'a> {
    op: &'a dyn LinearOperator,
    transposed: bool,
}

impl<'a> Tall<'a> {
    fn new(op: &'a dyn LinearOperator) -> Self {
        Tall { op, transposed: op.nrows() < op.ncols() }
    }

    fn dim_in(&self) -> usize {
        if self.transposed { self.op.nrows() } else { self.op.ncols() }
    }

    fn dim_out(&self) -> usize {
        if self.transposed { self.op.ncols() } else { self.op.nrows() }
    }

    fn fwd(&self, x: &[f64], y: &mut [f64]) {
        if self.transposed { self.op.apply_transpose(x, y) } else { self.op.apply(x, y) }
    }

    fn bwd(&self, x: &[f64], y: &mut [f64]) {
        if self.transposed { self.op.apply(x, y) } else { self.op.apply_transpose(x, y) }
    }

    fn guard(&self) -> f64 {
        64.0 * f64::EPSILON / 2.0 * self.dim_in().max(self.dim_out()).max(1) as f64
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_finite(v: &[f64], context: &str, step: usize) -> Result<()> {
    if let Some(i) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::numerical(
            context,
            format!("non-finite matvec output (component {i}, step {step})"),
        ));
    }
    Ok(())
}

fn reorthogonalize(basis: &[Vec<f64>], w: &mut [f64]) {
    for _ in 0..2 {
        for b in basis {
            let h = dot(b, w);
            w.iter_mut().zip(b).for_each(|(x, y)| *x -= h * y);
        }
    }
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let n = norm(&v);
        if n > 0.0 {
            v.iter_mut().for_each(|x| *x /= n);
            return v;
        }
    }
}

enum Advance {
    Stepped,
    Exhausted,
    TimedOut,
}

/// Golub-Kahan-Lanczos state: `B V_k = U_k B_k` with `B_k` upper bidiagonal.
struct Gkl<'a> {
    b: Tall<'a>,
    v: Vec<Vec<f64>>,
    u: Vec<Vec<f64>>,
    alpha: Vec<f64>,
    /// `beta[k]` couples `u_k` to `v_{k+1}`; the last entry is the residual coupling.
    beta: Vec<f64>,
    next_v: Option<Vec<f64>>,
    exhausted: bool,
    scale: f64,
    context: &'static str,
}

impl<'a> Gkl<'a> {
    fn new(b: Tall<'a>, start: Vec<f64>, context: &'static str) -> Self {
        Gkl {
            b,
            v: Vec::new(),
            u: Vec::new(),
            alpha: Vec::new(),
            beta: Vec::new(),
            next_v: Some(start),
            exhausted: false,
            scale: 0.0,
            context,
        }
    }

    fn k(&self) -> usize {
        self.alpha.len()
    }

    fn tiny(&self) -> f64 {
        self.b.guard() * self.scale
    }

    fn timed_out(deadline: Option<Instant>) -> bool {
        deadline.is_some_and(|d| Instant::now() >= d)
    }

    /// Extends the factorization by one column pair.
    fn advance(&mut self, deadline: Option<Instant>) -> Result<Advance> {
        if self.exhausted {
            return Ok(Advance::Exhausted);
        }
        let Some(v) = self.next_v.take() else {
            self.exhausted = true;
            return Ok(Advance::Exhausted);
        };
        if Self::timed_out(deadline) {
            return Ok(Advance::TimedOut);
        }
        let k = self.k();
        let mut u = vec![0.0; self.b.dim_out()];
        self.b.fwd(&v, &mut u);
        check_finite(&u, self.context, k)?;
        if let (Some(prev), Some(&beta)) = (self.u.last(), self.beta.last()) {
            u.iter_mut().zip(prev).for_each(|(x, p)| *x -= beta * p);
        }
        reorthogonalize(&self.u, &mut u);
        let alpha = norm(&u);
        self.scale = self.scale.max(alpha);
        self.v.push(v);
        self.alpha.push(alpha);
        if alpha <= self.tiny() || alpha == 0.0 {
            // op v lies in the span of earlier left vectors: a zero Ritz value.
            self.alpha[k] = 0.0;
            self.u.push(vec![0.0; self.b.dim_out()]);
            self.beta.push(0.0);
            self.exhausted = true;
            return Ok(Advance::Exhausted);
        }
        u.iter_mut().for_each(|x| *x /= alpha);

        if Self::timed_out(deadline) {
            self.u.push(u);
            self.beta.push(f64::INFINITY);
            return Ok(Advance::TimedOut);
        }
        let mut w = vec![0.0; self.b.dim_in()];
        self.b.bwd(&u, &mut w);
        check_finite(&w, self.context, k)?;
        let vk = &self.v[k];
        w.iter_mut().zip(vk).for_each(|(x, p)| *x -= alpha * p);
        reorthogonalize(&self.v, &mut w);
        let beta = norm(&w);
        self.scale = self.scale.max(beta);
        self.u.push(u);
        self.beta.push(beta);
        if beta <= self.tiny() || self.k() >= self.b.dim_in() {
            self.exhausted = true;
            return Ok(Advance::Exhausted);
        }
        w.iter_mut().for_each(|x| *x /= beta);
        self.next_v = Some(w);
        Ok(Advance::Stepped)
    }

    fn bidiagonal(&self) -> DMatrix<f64> {
        let k = self.k();
        let mut bk = DMatrix::zeros(k, k);
        for i in 0..k {
            bk[(i, i)] = self.alpha[i];
            if i + 1 < k {
                bk[(i, i + 1)] = self.beta[i];
            }
        }
        bk
    }

    fn ritz_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.bidiagonal().singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    /// Ritz triples `(θ, right Ritz vector, residual)`, sorted by descending `θ`.
    fn ritz_triples(&self) -> Vec<(f64, Vec<f64>, f64)> {
        let k = self.k();
        let svd = self.bidiagonal().svd(true, true);
        let (Some(left), Some(vt)) = (svd.u.as_ref(), svd.v_t.as_ref()) else {
            return Vec::new();
        };
        let last_beta = if self.exhausted { 0.0 } else { *self.beta.last().unwrap_or(&0.0) };
        let mut out: Vec<(f64, Vec<f64>, f64)> = (0..svd.singular_values.len())
            .map(|i| {
                let theta = svd.singular_values[i];
                let mut y = vec![0.0; self.b.dim_in()];
                for j in 0..k {
                    let c = vt[(i, j)];
                    y.iter_mut().zip(&self.v[j]).for_each(|(a, b)| *a += c * b);
                }
                let residual = (last_beta * left[(k - 1, i)]).abs();
                (theta, y, residual)
            })
            .collect();
        out.sort_by(|a, b| b.0.total_cmp(&a.0));
        out
    }

    /// `‖B y‖ / ‖y‖` measured directly.
    fn measure(&mut self, y: &[f64]) -> Result<f64> {
        let ny = norm(y);
        if ny == 0.0 {
            return Ok(0.0);
        }
        let mut out = vec![0.0; self.b.dim_out()];
        self.b.fwd(y, &mut out);
        check_finite(&out, self.context, self.k())?;
        let rho = norm(&out) / ny;
        self.scale = self.scale.max(rho);
        Ok(rho)
    }
}

fn start_vector(seed: u64, dim: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    random_unit(&mut rng, dim)
}

/// Lower bound on the largest singular value of `op`.
pub fn sigma_max_lower(op: &dyn LinearOperator, max_iters: usize, tol: f64, seed: u64) -> Result<SigmaMax> {
    let b = Tall::new(op);
    if b.dim_in() == 0 || b.dim_out() == 0 {
        return Ok(SigmaMax { lower: 0.0, raw: 0.0, iterations: 0, converged: true });
    }
    let guard = b.guard();
    let dim = b.dim_in();
    let mut gkl = Gkl::new(b, start_vector(seed, dim), "sigma_max_lower");
    let mut prev = f64::NAN;
    let mut converged = false;
    while gkl.k() < max_iters.max(1) {
        let outcome = gkl.advance(None)?;
        let k = gkl.k();
        let done = matches!(outcome, Advance::Exhausted);
        if done || k <= 10 || k % 5 == 0 || k == max_iters {
            let theta = gkl.ritz_values()[0];
            if done || (theta > 0.0 && ((theta - prev).abs() / theta) < tol) {
                converged = true;
                break;
            }
            prev = theta;
        }
    }
    let iterations = gkl.k();
    let triples = gkl.ritz_triples();
    let raw = match triples.first() {
        Some((_, y, _)) => {
            let y = y.clone();
            gkl.measure(&y)?
        }
        None => 0.0,
    };
    Ok(SigmaMax { lower: raw * (1.0 - guard), raw, iterations, converged })
}

/// Upper bound on the smallest singular value of `op` (over the smaller
/// dimension): iterative first, random unit vectors as fallback.
pub fn sigma_min_upper(op: &dyn LinearOperator, cfg: &SpectralConfig) -> Result<SigmaMin> {
    let b = Tall::new(op);
    if b.dim_in() == 0 || b.dim_out() == 0 {
        return Ok(SigmaMin {
            upper: 0.0,
            raw: 0.0,
            noise_floor: 0.0,
            method: SigmaMinMethod::RankDeficiencyExact,
            iterations: 0,
            samples: 0,
        });
    }
    let guard = b.guard();
    let dim = b.dim_in();
    let started = Instant::now();
    let deadline = started.checked_add(cfg.timeout);
    let mut iterations = 0;

    if !cfg.force_sampling && !cfg.timeout.is_zero() {
        let mut gkl = Gkl::new(Tall::new(op), start_vector(cfg.seed.wrapping_add(1), dim), "sigma_min_upper");
        let cap = cfg.min_max_iters.max(1).min(dim);
        let mut accepted: Option<Vec<f64>> = None;
        loop {
            let outcome = gkl.advance(deadline)?;
            let k = gkl.k();
            match outcome {
                Advance::TimedOut => break,
                Advance::Stepped if k % 10 != 0 && k < cap => continue,
                _ => {}
            }
            let triples = gkl.ritz_triples();
            let theta_max = triples.first().map_or(0.0, |t| t.0);
            if let Some((_, y, residual)) = triples.last() {
                if *residual < cfg.min_residual_tol * theta_max || matches!(outcome, Advance::Exhausted) && *residual == 0.0 {
                    accepted = Some(y.clone());
                    break;
                }
            }
            if matches!(outcome, Advance::Exhausted) || k >= cap {
                break;
            }
        }
        iterations = gkl.k();
        if let Some(y) = accepted {
            if !Gkl::timed_out(deadline) {
                let raw = gkl.measure(&y)?;
                return Ok(SigmaMin {
                    upper: raw * (1.0 + guard) + guard * gkl.scale,
                    raw,
                    noise_floor: guard * gkl.scale,
                    method: SigmaMinMethod::Iterative,
                    iterations,
                    samples: 0,
                });
            }
        }
    }

    if cfg.n_samples == 0 {
        return Err(Error::Estimation(
            "sigma_min: iterative stage did not deliver and no random samples are configured".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best = f64::INFINITY;
    let mut scale = 0.0f64;
    let mut out = vec![0.0; b.dim_out()];
    for i in 0..cfg.n_samples {
        let w = random_unit(&mut rng, dim);
        b.fwd(&w, &mut out);
        check_finite(&out, "sigma_min_upper", i)?;
        let rho = norm(&out) / norm(&w);
        best = best.min(rho);
        scale = scale.max(rho);
    }
    Ok(SigmaMin {
        upper: best * (1.0 + guard) + guard * scale,
        raw: best,
        noise_floor: guard * scale,
        method: SigmaMinMethod::RandomSampling,
        iterations,
        samples: cfg.n_samples,
    })
}

/// Condition-number lower bound with the singular-value bounds it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KappaEstimate {
    pub kappa_lower: f64,
    pub sigma_max_lb: f64,
    pub sigma_min_ub: f64,
    pub sigma_min_method: SigmaMinMethod,
    /// The bounds crossed and κ was clamped to 1.
    pub clamped: bool,
    /// The smallest singular value is zero to working precision.
    pub singular: bool,
    pub max_iterations: usize,
    pub min_iterations: usize,
    pub min_samples: usize,
}

/// `κ(M̂) ≥ (1 + σ_max(F̄)²) / (1 + σ_min(F̄)²)` where `M̂ = I + F̄F̄ᵀ`.
///
/// With fewer nonbasic than basic columns `F̄F̄ᵀ` is singular, so
/// `λ_min(M̂) = 1` exactly and only `σ_max` is estimated.
pub fn kappa_lower_mnes(fbar: &dyn LinearOperator, m: usize, n: usize, cfg: &SpectralConfig) -> Result<KappaEstimate> {
    let smax = sigma_max_lower(fbar, cfg.max_iters, cfg.tol, cfg.seed)?;
    let (smin_ub, method, min_iterations, min_samples) = if n - m < m {
        (0.0, SigmaMinMethod::RankDeficiencyExact, 0, 0)
    } else {
        let s = sigma_min_upper(fbar, cfg)?;
        (s.upper, s.method, s.iterations, s.samples)
    };
    let mut kappa = (1.0 + smax.lower * smax.lower) / (1.0 + smin_ub * smin_ub);
    let clamped = kappa < 1.0;
    if clamped {
        kappa = 1.0;
    }
    Ok(KappaEstimate {
        kappa_lower: kappa,
        sigma_max_lb: smax.lower,
        sigma_min_ub: smin_ub,
        sigma_min_method: method,
        clamped,
        singular: false,
        max_iterations: smax.iterations,
        min_iterations,
        min_samples,
    })
}

/// `κ(O) ≥ σ_max_lb / σ_min_ub`, clamped to at least 1.
pub fn kappa_lower_oss(oss: &dyn LinearOperator, cfg: &SpectralConfig) -> Result<KappaEstimate> {
    let smax = sigma_max_lower(oss, cfg.max_iters, cfg.tol, cfg.seed)?;
    let smin = sigma_min_upper(oss, cfg)?;
    let singular = smin.raw <= smin.noise_floor;
    let (kappa, clamped) = if singular {
        (f64::INFINITY, false)
    } else {
        let k = smax.lower / smin.upper;
        if k < 1.0 { (1.0, true) } else { (k, false) }
    };
    Ok(KappaEstimate {
        kappa_lower: kappa,
        sigma_max_lb: smax.lower,
        sigma_min_ub: smin.upper,
        sigma_min_method: smin.method,
        clamped,
        singular,
        max_iterations: smax.iterations,
        min_iterations: smin.iterations,
        min_samples: smin.samples,
    })
}

/// Sparsity, condition-number bound and difficulty `γ = s·κ` of one system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifficultyEstimate {
    pub sparsity: u64,
    pub sparsity_rule: SparsityRule,
    /// Value of the generic structural rule, for reference.
    pub generic_sparsity: u64,
    pub kappa_lower: f64,
    pub gamma: f64,
    pub sigma_max_lb: f64,
    pub sigma_min_ub: f64,
    pub sigma_min_method: SigmaMinMethod,
    pub clamped: bool,
    pub singular: bool,
    pub elapsed_s: f64,
}

impl DifficultyEstimate {
    pub fn new(sparsity: &SparsityMeasure, kappa: &KappaEstimate, elapsed: Duration) -> Self {
        DifficultyEstimate {
            sparsity: sparsity.value,
            sparsity_rule: sparsity.rule,
            generic_sparsity: sparsity.generic,
            kappa_lower: kappa.kappa_lower,
            gamma: sparsity.value as f64 * kappa.kappa_lower,
            sigma_max_lb: kappa.sigma_max_lb,
            sigma_min_ub: kappa.sigma_min_ub,
            sigma_min_method: kappa.sigma_min_method,
            clamped: kappa.clamped,
            singular: kappa.singular,
            elapsed_s: elapsed.as_secs_f64(),
        }
    }
}
