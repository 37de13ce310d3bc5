//! Single-instance pipeline: parse, reduce, build both Newton systems at the
//! canonical iterate, bound their difficulty, cost them and compare with a
//! classical solve.

use std::path::Path;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::config::AnalysisConfig;
use crate::basis::{select_basis_limited, BasisSelection};
use crate::classical::{solve_external, solve_internal_ipm, SolveOutcome, SolveStatus};
use crate::cost::{qlsa_query_count, runtime_below, total_quantum_cycles_sk};
use crate::error::{Error, Result};
use crate::lp::mps::parse_mps;
use crate::lp::StandardLp;
use crate::newton::{build_fbar, build_mnes, build_oss, Iterate};
use crate::presolve::{ensure_full_row_rank, presolve, to_standard_form};
use crate::spectral::sparsity::{measured_sparsity_mnes, measured_sparsity_oss};
use crate::spectral::{kappa_lower_mnes, kappa_lower_oss, DifficultyEstimate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formulation {
    Mnes,
    Oss,
}

impl Formulation {
    pub const ALL: [Formulation; 2] = [Formulation::Mnes, Formulation::Oss];

    pub fn as_str(self) -> &'static str {
        match self {
            Formulation::Mnes => "mnes",
            Formulation::Oss => "oss",
        }
    }
}

/// Where and why a stage failed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub stage: String,
    pub message: String,
}

impl Failure {
    pub fn new(stage: &str, message: impl Into<String>) -> Failure {
        Failure { stage: stage.to_string(), message: message.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormulationRecord {
    pub formulation: Formulation,
    /// Solution dimension entering the tomography factor.
    pub d: u64,
    pub difficulty: Option<DifficultyEstimate>,
    #[serde(with = "opt_biguint")]
    pub query_count: Option<BigUint>,
    #[serde(with = "opt_biguint")]
    pub total_cycles: Option<BigUint>,
    pub degenerate: bool,
    /// Per grid duration: quantum lower bound below the classical wall time.
    pub quantum_lb_below_classical: Vec<bool>,
    pub failure: Option<Failure>,
    pub elapsed_s: f64,
}

mod opt_biguint {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => s.serialize_some(&v.to_str_radix(10)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigUint>, D::Error> {
        let text: Option<String> = Option::deserialize(d)?;
        text.map(|t| t.parse().map_err(serde::de::Error::custom)).transpose()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageTime {
    pub stage: String,
    pub elapsed_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hardware {
    pub os: String,
    pub arch: String,
    pub cpus: usize,
    pub cpu_model: Option<String>,
}

impl Hardware {
    pub fn detect() -> Hardware {
        let cpu_model = std::fs::read_to_string("/proc/cpuinfo").ok().and_then(|t| {
            t.lines()
                .find(|l| l.starts_with("model name"))
                .and_then(|l| l.split_once(':'))
                .map(|(_, v)| v.trim().to_string())
        });
        Hardware {
            os: std::env::consts::OS.to_string(),
            arch: std::env::consts::ARCH.to_string(),
            cpus: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
            cpu_model,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub seed: u64,
    pub config_hash: String,
    pub started_at_unix_s: f64,
    pub hardware: Hardware,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub name: String,
    pub family: String,
    pub path: String,
    pub original_rows: Option<usize>,
    pub original_cols: Option<usize>,
    /// Dimensions of the full-row-rank standard form.
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub presolve_actions: usize,
    pub dropped_rows: usize,
    pub mnes: Option<FormulationRecord>,
    pub oss: Option<FormulationRecord>,
    pub classical: Option<SolveOutcome>,
    /// The classical time comes from the built-in IPM rather than an external solver.
    pub classical_internal_baseline: bool,
    pub failure: Option<Failure>,
    pub stage_times: Vec<StageTime>,
    pub metadata: Metadata,
}

impl InstanceRecord {
    pub fn formulation(&self, f: Formulation) -> Option<&FormulationRecord> {
        match f {
            Formulation::Mnes => self.mnes.as_ref(),
            Formulation::Oss => self.oss.as_ref(),
        }
    }

    /// Any stage, formulation or the classical solve failed.
    pub fn errored(&self) -> bool {
        self.failure.is_some()
            || Formulation::ALL
                .iter()
                .any(|&f| self.formulation(f).is_none_or(|r| r.failure.is_some()))
            || self.classical.as_ref().is_none_or(|c| c.status != SolveStatus::Optimal)
    }

    /// Classical wall time usable for exclusion analysis.
    pub fn classical_wall_time(&self) -> Option<f64> {
        self.classical.as_ref().filter(|c| c.status == SolveStatus::Optimal).map(|c| c.wall_time_s)
    }

    /// Copy with every timing field and timing-derived flag cleared, for
    /// determinism comparisons.
    pub fn without_timings(&self) -> InstanceRecord {
        let mut r = self.clone();
        r.metadata.started_at_unix_s = 0.0;
        r.metadata.hardware = Hardware { os: String::new(), arch: String::new(), cpus: 0, cpu_model: None };
        r.stage_times.iter_mut().for_each(|s| s.elapsed_s = 0.0);
        if let Some(c) = r.classical.as_mut() {
            c.wall_time_s = 0.0;
            c.serialization_time_s = c.serialization_time_s.map(|_| 0.0);
        }
        for f in [r.mnes.as_mut(), r.oss.as_mut()].into_iter().flatten() {
            f.elapsed_s = 0.0;
            f.quantum_lb_below_classical.clear();
            if let Some(d) = f.difficulty.as_mut() {
                d.elapsed_s = 0.0;
            }
        }
        r
    }
}

struct Stages {
    times: Vec<StageTime>,
}

impl Stages {
    fn run<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let t = Instant::now();
        let out = f();
        self.times.push(StageTime { stage: stage.to_string(), elapsed_s: t.elapsed().as_secs_f64() });
        out
    }
}

/// Everything up to and including the basis.
pub struct Prepared {
    pub std: StandardLp,
    pub basis: BasisSelection,
    pub original_rows: usize,
    pub original_cols: usize,
    pub presolve_actions: usize,
    pub dropped_rows: usize,
}

/// Parse → presolve → standardize → rank repair → basis.
pub fn prepare(text: &str, max_dense_rows: usize) -> std::result::Result<Prepared, Failure> {
    prepare_staged(text, max_dense_rows, &mut Stages { times: Vec::new() })
}

fn prepare_staged(text: &str, max_dense_rows: usize, st: &mut Stages) -> std::result::Result<Prepared, Failure> {
    let lp = st.run("parse", || parse_mps(text)).map_err(|e| Failure::new("parse", e.to_string()))?;
    let pre = st.run("presolve", || presolve(&lp)).map_err(|e| Failure::new("presolve", e.to_string()))?;
    let std = st
        .run("standardize", || to_standard_form(&pre.lp))
        .map_err(|e| Failure::new("standardize", e.to_string()))?;
    let rr = st
        .run("rank_repair", || ensure_full_row_rank(&std))
        .map_err(|e| Failure::new("rank_repair", e.to_string()))?;
    if rr.lp.m() == 0 {
        return Err(Failure::new("rank_repair", "no constraints remain after reduction"));
    }
    let basis = st
        .run("basis", || select_basis_limited(&rr.lp.a, max_dense_rows))
        .map_err(|e| Failure::new("basis", e.to_string()))?;
    Ok(Prepared {
        std: rr.lp,
        basis,
        original_rows: lp.n_rows(),
        original_cols: lp.n_cols(),
        presolve_actions: pre.actions.len(),
        dropped_rows: rr.dropped.len(),
    })
}

/// Difficulty of one formulation at the canonical iterate.
pub fn formulation_difficulty(
    f: Formulation,
    std: &StandardLp,
    basis: &BasisSelection,
    cfg: &AnalysisConfig,
    seed: u64,
) -> Result<DifficultyEstimate> {
    let t = Instant::now();
    let (m, n) = (std.m(), std.n());
    let it = Iterate::canonical(m, n);
    let beta_mu = it.default_beta_mu();
    let spectral = cfg.spectral(seed);
    let (sparsity, kappa) = match f {
        Formulation::Mnes => {
            let mnes = build_mnes(std, &it, basis, beta_mu)?;
            let s = measured_sparsity_mnes(&mnes, cfg.probe_budget)?;
            let fbar = build_fbar(basis, &std.a, &it)?;
            (s, kappa_lower_mnes(&fbar, m, n, &spectral)?)
        }
        Formulation::Oss => {
            let oss = build_oss(std, &it, basis, beta_mu)?;
            let s = measured_sparsity_oss(&std.a, basis, cfg.probe_budget)?;
            (s, kappa_lower_oss(&oss, &spectral)?)
        }
    };
    if kappa.singular || !kappa.kappa_lower.is_finite() {
        return Err(Error::Estimation(format!(
            "system is singular to working precision (sigma_max >= {:e}, sigma_min <= {:e})",
            kappa.sigma_max_lb, kappa.sigma_min_ub
        )));
    }
    Ok(DifficultyEstimate::new(&sparsity, &kappa, t.elapsed()))
}

fn formulation_seed(seed: u64, f: Formulation) -> u64 {
    match f {
        Formulation::Mnes => seed,
        Formulation::Oss => seed ^ 0x9e37_79b9_7f4a_7c15,
    }
}

fn analyze_formulation(
    f: Formulation,
    p: &Prepared,
    cfg: &AnalysisConfig,
    seed: u64,
) -> FormulationRecord {
    let t = Instant::now();
    let d = match f {
        Formulation::Mnes => p.std.m(),
        Formulation::Oss => p.std.n(),
    } as u64;
    let mut rec = FormulationRecord {
        formulation: f,
        d,
        difficulty: None,
        query_count: None,
        total_cycles: None,
        degenerate: false,
        quantum_lb_below_classical: Vec::new(),
        failure: None,
        elapsed_s: 0.0,
    };
    match formulation_difficulty(f, &p.std, &p.basis, cfg, formulation_seed(seed, f)) {
        Err(e) => rec.failure = Some(Failure::new("difficulty", e.to_string())),
        Ok(est) => {
            let costs = qlsa_query_count(est.sparsity, est.kappa_lower, cfg.epsilon, 1).and_then(|q| {
                total_quantum_cycles_sk(d, est.sparsity, est.kappa_lower, cfg.epsilon).map(|c| (q, c))
            });
            match costs {
                Ok((q, c)) => {
                    rec.query_count = Some(q);
                    rec.degenerate = c.degenerate;
                    rec.total_cycles = Some(c.cycles);
                }
                Err(e) => rec.failure = Some(Failure::new("cost", e.to_string())),
            }
            rec.difficulty = Some(est);
        }
    }
    rec.elapsed_s = t.elapsed().as_secs_f64();
    rec
}

fn classical_solve(std: &StandardLp, cfg: &AnalysisConfig) -> (SolveOutcome, bool) {
    match &cfg.external {
        Some(ext) => {
            let outcome = match tempfile::tempdir() {
                Ok(dir) => solve_external(std, ext, dir.path()),
                Err(e) => SolveOutcome {
                    status: SolveStatus::Error,
                    objective: None,
                    iterations: 0,
                    wall_time_s: 0.0,
                    solver: crate::classical::SolverKind::External(ext.name.clone()),
                    serialization_time_s: None,
                    message: Some(format!("cannot create working directory: {e}")),
                    output: None,
                },
            };
            (outcome, false)
        }
        None => (solve_internal_ipm(std, &cfg.ipm), true),
    }
}

/// Exclusion flags on `durations` for one formulation.
pub fn exclusion_flags(cycles: Option<&BigUint>, wall_time: Option<f64>, durations: &[f64]) -> Vec<bool> {
    match (cycles, wall_time) {
        (Some(c), Some(w)) => durations.iter().map(|&t| runtime_below(c, t, w)).collect(),
        _ => Vec::new(),
    }
}

/// Family tag and name of an instance path relative to the suite root.
pub fn family_and_name(root: &Path, path: &Path) -> (String, String) {
    let rel = path.strip_prefix(root).unwrap_or(path);
    let family = rel
        .parent()
        .and_then(|p| p.components().next())
        .map(|c| c.as_os_str().to_string_lossy().into_owned())
        .unwrap_or_else(|| "misc".to_string());
    let name = rel.to_string_lossy().replace('\\', "/");
    (family, name)
}

pub(crate) fn empty_record(name: &str, family: &str, path: &Path, cfg: &AnalysisConfig, seed: u64) -> InstanceRecord {
    InstanceRecord {
        name: name.to_string(),
        family: family.to_string(),
        path: path.to_string_lossy().into_owned(),
        original_rows: None,
        original_cols: None,
        m: None,
        n: None,
        presolve_actions: 0,
        dropped_rows: 0,
        mnes: None,
        oss: None,
        classical: None,
        classical_internal_baseline: cfg.external.is_none(),
        failure: None,
        stage_times: Vec::new(),
        metadata: Metadata {
            seed,
            config_hash: cfg.hash(),
            started_at_unix_s: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0),
            hardware: Hardware::detect(),
        },
    }
}

/// Runs the full pipeline on one MPS file. Failures are recorded, never raised.
pub fn analyze_instance(
    path: &Path,
    name: &str,
    family: &str,
    cfg: &AnalysisConfig,
    seed: u64,
) -> InstanceRecord {
    let mut rec = empty_record(name, family, path, cfg, seed);
    let mut st = Stages { times: Vec::new() };
    let text = match st.run("read", || std::fs::read_to_string(path)) {
        Ok(t) => t,
        Err(e) => {
            rec.failure = Some(Failure::new("read", format!("{}: {e}", path.display())));
            rec.stage_times = st.times;
            return rec;
        }
    };
    let prepared = match prepare_staged(&text, cfg.max_dense_rows, &mut st) {
        Ok(p) => p,
        Err(f) => {
            rec.failure = Some(f);
            rec.stage_times = st.times;
            return rec;
        }
    };
    rec.original_rows = Some(prepared.original_rows);
    rec.original_cols = Some(prepared.original_cols);
    rec.m = Some(prepared.std.m());
    rec.n = Some(prepared.std.n());
    rec.presolve_actions = prepared.presolve_actions;
    rec.dropped_rows = prepared.dropped_rows;
    let mut mnes = st.run("mnes", || analyze_formulation(Formulation::Mnes, &prepared, cfg, seed));
    let mut oss = st.run("oss", || analyze_formulation(Formulation::Oss, &prepared, cfg, seed));
    let (classical, internal) = st.run("classical", || classical_solve(&prepared.std, cfg));
    rec.classical = Some(classical);
    rec.classical_internal_baseline = internal;
    let durations = cfg.durations.durations().unwrap_or_default();
    let wall = rec.classical_wall_time();
    for f in [&mut mnes, &mut oss] {
        f.quantum_lb_below_classical = exclusion_flags(f.total_cycles.as_ref(), wall, &durations);
    }
    rec.mnes = Some(mnes);
    rec.oss = Some(oss);
    rec.stage_times = st.times;
    rec
}
