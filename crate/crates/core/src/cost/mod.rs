//! Query count of the Chebyshev QLSA, total quantum cycles including
//! tomography, and runtime lower bounds over a grid of cycle durations.
//!
//! All ceilings are exact. Real inputs (`κ`, `γ`, `ε`) are read as the
//! decimal numbers they print as, so `ε = 0.1` is exactly `1/10`. A
//! double-precision evaluation is used when its distance to the next integer
//! is far larger than its rounding error; otherwise certified interval
//! bounds are tightened until the ceiling is determined.

pub mod exact;

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use exact::{ceil_sqrt_int, log2_interval, Ratio};

/// Reference cycle duration, 800 ps.
pub const REFERENCE_CYCLE_DURATION: f64 = 8e-10;

const START_PREC: u32 = 96;
const MAX_PREC: u32 = 1 << 16;

/// Inputs of the end-to-end cost bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumCostInputs {
    pub d: u64,
    pub s: u64,
    pub kappa: f64,
    pub epsilon: f64,
    pub n_qaa: u64,
    pub ir_steps: u64,
    pub ipm_iterations: u64,
}

impl QuantumCostInputs {
    pub fn new(d: u64, s: u64, kappa: f64) -> QuantumCostInputs {
        QuantumCostInputs { d, s, kappa, epsilon: 0.1, n_qaa: 1, ir_steps: 1, ipm_iterations: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantumCostResult {
    #[serde(with = "biguint_string")]
    pub query_count: BigUint,
    /// `total_quantum_cycles` times the IR-step and IPM-iteration counts.
    #[serde(with = "biguint_string")]
    pub total_cycles: BigUint,
    pub gamma: f64,
    pub degenerate: bool,
    /// `(cycle duration, runtime lower bound)` pairs in seconds.
    pub runtime_at: Vec<(f64, f64)>,
}

/// Serializes big integers as decimal strings.
pub mod biguint_string {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_str_radix(10))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let text = String::deserialize(d)?;
        text.parse().map_err(serde::de::Error::custom)
    }
}

/// Cycle count with the flag for `d ≤ 1`, where the tomography factor vanishes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleCount {
    pub cycles: BigUint,
    pub degenerate: bool,
}

fn epsilon_ratio(epsilon: f64) -> Result<Ratio> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Domain(format!("epsilon must lie in (0, 1), got {epsilon}")));
    }
    Ratio::from_f64_decimal(epsilon).ok_or_else(|| Error::Domain(format!("epsilon {epsilon} not representable")))
}

fn gamma_ratio(what: &str, v: f64) -> Result<Ratio> {
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::Domain(format!("{what} must be positive and finite, got {v}")));
    }
    Ok(Ratio::from_f64_decimal(v).expect("finite positive"))
}

/// `⌈v⌉` by a double-precision fast path when `v` is at least `margin` away
/// from every integer.
fn fast_ceil(v: f64, margin: f64) -> Option<u64> {
    if !(v.is_finite() && v >= 0.0 && v < 2f64.powi(50)) {
        return None;
    }
    let dist = (v - v.round()).abs();
    (dist > margin).then(|| v.ceil() as u64)
}

/// `N = ⌈x² log2(x/ε)⌉`.
fn inner_ceiling(x: &Ratio, eps: &Ratio) -> BigUint {
    let ratio = x.div(eps);
    let x2 = x.mul(x);
    if let Some(k) = ratio.exact_log2() {
        return x2.mul(&Ratio::integer(k as u64)).ceil();
    }
    let (xf, ef) = (x.to_f64(), eps.to_f64());
    let v = xf * xf * (xf / ef).log2();
    if let Some(c) = fast_ceil(v, 1e-9 * (v + xf * xf) + 1e-9) {
        return BigUint::from(c);
    }
    let mut prec = START_PREC;
    loop {
        if let Some(c) = log2_interval(&ratio, prec).mul_ratio(&x2).ceil() {
            return c;
        }
        assert!(prec < MAX_PREC, "ceiling undecided at {prec} bits");
        prec *= 2;
    }
}

/// `⌈√(N log2(4N/ε))⌉`.
fn outer_ceiling(n: &BigUint, eps: &Ratio) -> BigUint {
    let four_n_over_eps = Ratio::integer(n * 4u32).div(eps);
    let n_ratio = Ratio::integer(n.clone());
    if let Some(k) = four_n_over_eps.exact_log2() {
        return ceil_sqrt_int(&(n * BigUint::from(k as u64)));
    }
    if let Some(nf) = n.to_u64().filter(|&v| v < (1 << 50)) {
        let nf = nf as f64;
        let y = nf * (4.0 * nf / eps.to_f64()).log2();
        let r = y.sqrt();
        if let Some(c) = fast_ceil(r, 1e-9 * (r + 1.0)) {
            return BigUint::from(c);
        }
    }
    let mut prec = START_PREC;
    loop {
        if let Some(c) = log2_interval(&four_n_over_eps, prec).mul_ratio(&n_ratio).ceil_sqrt() {
            return c;
        }
        assert!(prec < MAX_PREC, "ceiling undecided at {prec} bits");
        prec *= 2;
    }
}

/// `⌈√(⌈γ² log2(γ/ε)⌉ · log2((4/ε)⌈γ² log2(γ/ε)⌉))⌉` for exact `γ` and `ε`.
fn bracket_exact(gamma: &Ratio, eps: &Ratio) -> Result<BigUint> {
    if gamma.div(eps).cmp_one() != Ordering::Greater {
        return Err(Error::Domain("γ/ε must exceed 1 for a positive logarithm".into()));
    }
    let n = inner_ceiling(gamma, eps);
    Ok(outer_ceiling(&n, eps))
}

/// The square-root bracket shared by the query count and the cycle count.
pub fn bracket(gamma: f64, epsilon: f64) -> Result<BigUint> {
    bracket_exact(&gamma_ratio("gamma", gamma)?, &epsilon_ratio(epsilon)?)
}

fn sk_ratio(s: u64, kappa: f64) -> Result<Ratio> {
    if s == 0 {
        return Err(Error::Domain("sparsity must be at least 1".into()));
    }
    if !(kappa.is_finite() && kappa >= 1.0) {
        return Err(Error::Domain(format!("kappa must be finite and at least 1, got {kappa}")));
    }
    Ok(Ratio::integer(s).mul(&gamma_ratio("kappa", kappa)?))
}

/// Query count `Q = 8 · bracket(sκ, ε) · n_qaa` with `sκ` formed exactly.
pub fn qlsa_query_count(s: u64, kappa: f64, epsilon: f64, n_qaa: u64) -> Result<BigUint> {
    let eps = epsilon_ratio(epsilon)?;
    let b = bracket_exact(&sk_ratio(s, kappa)?, &eps)?;
    Ok(b * 8u32 * n_qaa)
}

/// `(2d, s, κ)` for a non-Hermitian system, unchanged otherwise.
pub fn hermitian_dilation_params(d: u64, s: u64, kappa: f64, is_hermitian: bool) -> (u64, u64, f64) {
    if is_hermitian { (d, s, kappa) } else { (2 * d, s, kappa) }
}

fn cycles_exact(d: u64, gamma: &Ratio, eps: &Ratio) -> Result<CycleCount> {
    let b = bracket_exact(gamma, eps)?;
    if d <= 1 {
        return Ok(CycleCount { cycles: BigUint::zero(), degenerate: true });
    }
    // ⌈8(d − 1) · bracket · den² / num²⌉ with ε = num/den
    let prefactor = Ratio::new(BigUint::from(8 * (d - 1)) * &eps.den * &eps.den, &eps.num * &eps.num);
    Ok(CycleCount { cycles: prefactor.mul(&Ratio::integer(b)).ceil(), degenerate: false })
}

/// Total quantum cycles `⌈8(d − 1)/ε² · bracket(γ, ε)⌉`.
pub fn total_quantum_cycles(d: u64, gamma: f64, epsilon: f64) -> Result<CycleCount> {
    cycles_exact(d, &gamma_ratio("gamma", gamma)?, &epsilon_ratio(epsilon)?)
}

/// Total quantum cycles with `γ = s·κ` formed exactly.
pub fn total_quantum_cycles_sk(d: u64, s: u64, kappa: f64, epsilon: f64) -> Result<CycleCount> {
    cycles_exact(d, &sk_ratio(s, kappa)?, &epsilon_ratio(epsilon)?)
}

/// `cycles × duration` in seconds.
pub fn runtime_lower_bound(cycles: &BigUint, cycle_duration: f64) -> f64 {
    if cycles.is_zero() {
        return 0.0;
    }
    match Ratio::from_f64(cycle_duration) {
        Some(t) => Ratio::integer(cycles.clone()).mul(&t).to_f64(),
        None => f64::NAN,
    }
}

/// Exact test of `cycles × duration < wall_time`.
pub fn runtime_below(cycles: &BigUint, cycle_duration: f64, wall_time: f64) -> bool {
    let (Some(t), Some(w)) = (Ratio::from_f64(cycle_duration), Ratio::from_f64(wall_time)) else {
        return false;
    };
    let lhs = BigInt::from(cycles * &t.num * &w.den);
    let rhs = BigInt::from(&w.num * &t.den);
    lhs < rhs
}

/// Logarithmic grid of cycle durations with a marked reference point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DurationGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    pub marker: f64,
}

impl Default for DurationGrid {
    fn default() -> Self {
        DurationGrid { min: 1e-15, max: 1e-3, points: 121, marker: REFERENCE_CYCLE_DURATION }
    }
}

impl DurationGrid {
    /// Ascending durations including the marker.
    pub fn durations(&self) -> Result<Vec<f64>> {
        if !(self.min > 0.0 && self.max >= self.min && self.marker > 0.0) || self.points == 0 {
            return Err(Error::Config(format!("invalid duration grid {self:?}")));
        }
        let (lo, hi) = (self.min.log10(), self.max.log10());
        let mut v: Vec<f64> = if self.points == 1 {
            vec![self.min]
        } else {
            (0..self.points)
                .map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / (self.points - 1) as f64))
                .collect()
        };
        v.push(self.marker);
        v.sort_by(f64::total_cmp);
        v.dedup();
        Ok(v)
    }
}

/// End-to-end evaluation; with the default inputs `total_cycles` equals
/// `total_quantum_cycles` alone.
pub fn evaluate(inputs: &QuantumCostInputs, grid: &[f64]) -> Result<QuantumCostResult> {
    let query_count = qlsa_query_count(inputs.s, inputs.kappa, inputs.epsilon, inputs.n_qaa)?;
    let c = total_quantum_cycles_sk(inputs.d, inputs.s, inputs.kappa, inputs.epsilon)?;
    let total_cycles = c.cycles * inputs.ir_steps * inputs.ipm_iterations;
    let runtime_at = grid.iter().map(|&t| (t, runtime_lower_bound(&total_cycles, t))).collect();
    Ok(QuantumCostResult {
        query_count,
        total_cycles,
        gamma: inputs.s as f64 * inputs.kappa,
        degenerate: c.degenerate,
        runtime_at,
    })
}
