//! Acceptance criteria, one PASS/FAIL line each.

mod common;

use std::time::{Duration, Instant};

use common::{dense_systems, max_abs, norm};
use nalgebra::DMatrix;
use num_bigint::BigUint;
use qipm_bound::basis::select_basis;
use qipm_bound::classical::{solve_external, solve_internal_ipm, ExternalConfig, IpmConfig, SolveStatus};
use qipm_bound::cost::{qlsa_query_count, runtime_lower_bound, total_quantum_cycles, total_quantum_cycles_sk};
use qipm_bound::harness::report::{records_csv, curves_csv, TIMING_COLUMNS};
use qipm_bound::harness::{exclusion_curve, prepare, run_suite, AnalysisConfig, Formulation};
use qipm_bound::lp::StandardLp;
use qipm_bound::newton::{
    build_fbar, build_mnes, build_nes, build_oss, newton_residuals, null_space_matrix, recover_updates_mnes,
    recover_updates_nes, recover_updates_oss, Iterate,
};
use qipm_bound::operator::{assemble_dense, DenseOperator, LinearOperator};
use qipm_bound::spectral::sparsity::{measured_sparsity_mnes, measured_sparsity_oss, DEFAULT_PROBE_BUDGET};
use qipm_bound::spectral::{
    kappa_lower_mnes, kappa_lower_oss, sigma_max_lower, sigma_min_upper, KappaEstimate, SigmaMinMethod,
    SpectralConfig,
};
use rand::Rng;
use serde::Deserialize;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within_budget(elapsed: Duration, budget: Option<Duration>) -> Result<(), String> {
    match budget {
        Some(b) if elapsed > b => Err(format!("took {:.1} s, budget {:.0} s", elapsed.as_secs_f64(), b.as_secs_f64())),
        _ => Ok(()),
    }
}

fn formula_exactness() -> Outcome {
    let mut rdr = csv::Reader::from_path(common::data("cost_reference.csv")).map_err(|e| e.to_string())?;
    let mut rows = 0;
    let mut epsilons = std::collections::BTreeSet::new();
    for r in rdr.records() {
        let r = r.map_err(|e| e.to_string())?;
        let s: u64 = r[0].parse().unwrap();
        let kappa: f64 = r[1].parse().unwrap();
        let eps: f64 = r[2].parse().unwrap();
        let d: u64 = r[3].parse().unwrap();
        let q: BigUint = r[4].parse().unwrap();
        let cycles: BigUint = r[5].parse().unwrap();
        let got_q = qlsa_query_count(s, kappa, eps, 1).map_err(|e| e.to_string())?;
        check(got_q == q, || format!("Q(s={s}, kappa={kappa}, eps={eps}) = {got_q}, expected {q}"))?;
        let got_c = total_quantum_cycles_sk(d, s, kappa, eps).map_err(|e| e.to_string())?.cycles;
        check(got_c == cycles, || format!("cycles(d={d}, s={s}, kappa={kappa}, eps={eps}) = {got_c}, expected {cycles}"))?;
        rows += 1;
        epsilons.insert(r[2].to_string());
    }
    check(rows >= 1000, || format!("only {rows} reference rows"))?;
    for eps in ["0.5", "0.1", "0.01"] {
        check(epsilons.contains(eps), || format!("no reference rows at epsilon {eps}"))?;
    }
    let q = qlsa_query_count(1, 1.0, 0.1, 1).map_err(|e| e.to_string())?;
    check(q == BigUint::from(48u32), || format!("Q(1, 1, 0.1, 1) = {q}"))?;
    let c = total_quantum_cycles(2, 1.0, 0.1).map_err(|e| e.to_string())?.cycles;
    check(c == BigUint::from(4800u32), || format!("cycles(2, 1, 0.1) = {c}"))?;
    Ok(format!("{rows} grid points, anchors 48 and 4800"))
}

struct Truth {
    max: f64,
    min: f64,
    kappa: f64,
}

fn truth_of(m: &DMatrix<f64>) -> Truth {
    let sv = common::singular_values(m);
    let (max, min) = (sv[0], *sv.last().unwrap());
    Truth { max, min, kappa: max / min }
}

fn check_estimate(trial: usize, k: &KappaEstimate, t: &Truth) -> Result<(), String> {
    let kappa = t.kappa;
    check(k.kappa_lower <= kappa + 1e-9, || format!("trial {trial}: kappa {} > true {kappa}", k.kappa_lower))?;
    check(k.sigma_max_lb <= t.max, || format!("trial {trial}: sigma_max {} > true {}", k.sigma_max_lb, t.max))?;
    check(k.sigma_min_ub >= t.min, || format!("trial {trial}: sigma_min {} < true {}", k.sigma_min_ub, t.min))
}

fn kappa_soundness() -> Outcome {
    let (mut sampled, mut deficient) = (0, 0);
    for trial in 0..500 {
        let seed = 10_000 + trial as u64;
        let mut rng = common::rng(seed);
        let force_sampling = trial % 2 == 1;
        let cfg = SpectralConfig { seed, n_samples: 1000, force_sampling, ..Default::default() };
        let est = match trial % 4 {
            0 | 1 => {
                let rows = rng.random_range(2..=200);
                let cols = if rng.random::<bool>() { rows } else { rng.random_range(1..=rows) };
                let top = 10f64.powf(6.0 * rng.random::<f64>());
                let sv: Vec<f64> = (0..cols).map(|i| top.powf(-(i as f64) / (cols.max(2) - 1) as f64)).collect();
                let a = common::with_singular_values(&mut rng, rows, cols, &sv);
                let t = truth_of(&a);
                let op = DenseOperator(a);
                let smax = sigma_max_lower(&op, cfg.max_iters, cfg.tol, seed).map_err(|e| e.to_string())?;
                check(smax.lower <= t.max, || format!("trial {trial}: sigma_max_lower {} > {}", smax.lower, t.max))?;
                let smin = sigma_min_upper(&op, &cfg).map_err(|e| e.to_string())?;
                check(smin.upper >= t.min, || format!("trial {trial}: sigma_min_upper {} < {}", smin.upper, t.min))?;
                (kappa_lower_oss(&op, &cfg).map_err(|e| e.to_string())?, t)
            }
            2 => {
                let n = rng.random_range(2..=200);
                let m = rng.random_range(1..n);
                let std = common::random_lp(&mut rng, m, n, 3.0 / n as f64);
                let it = if rng.random::<bool>() { Iterate::canonical(m, n) } else { common::random_iterate(&mut rng, m, n) };
                let basis = select_basis(&std.a).map_err(|e| e.to_string())?;
                let oss = build_oss(&std, &it, &basis, it.default_beta_mu()).map_err(|e| e.to_string())?;
                let t = truth_of(&assemble_dense(&oss));
                (kappa_lower_oss(&oss, &cfg).map_err(|e| e.to_string())?, t)
            }
            _ => {
                let m = rng.random_range(2..=100);
                let n = if trial % 8 == 3 { m + rng.random_range(1..m) } else { m + rng.random_range(m..=100) };
                let std = common::random_lp(&mut rng, m, n, 3.0 / n as f64);
                let it = common::random_iterate(&mut rng, m, n);
                let basis = select_basis(&std.a).map_err(|e| e.to_string())?;
                let mnes = build_mnes(&std, &it, &basis, 0.5).map_err(|e| e.to_string())?;
                let fbar = build_fbar(&basis, &std.a, &it).map_err(|e| e.to_string())?;
                // The sigma bounds refer to Fbar, whose m-th singular value is 0 when n - m < m.
                let sv = common::singular_values(&assemble_dense(&fbar));
                let t = Truth {
                    max: sv[0],
                    min: sv.get(m - 1).copied().unwrap_or(0.0),
                    kappa: truth_of(&assemble_dense(&mnes)).kappa,
                };
                let k = kappa_lower_mnes(&fbar, m, n, &cfg).map_err(|e| e.to_string())?;
                if n - m < m {
                    check(k.sigma_min_method == SigmaMinMethod::RankDeficiencyExact, || {
                        format!("trial {trial}: n - m < m did not use the rank-deficiency path")
                    })?;
                    deficient += 1;
                }
                (k, t)
            }
        };
        let (k, t) = est;
        if k.sigma_min_method == SigmaMinMethod::RandomSampling {
            sampled += 1;
        }
        check_estimate(trial, &k, &t)?;
    }
    check(sampled > 0 && deficient > 0, || format!("sampled {sampled}, rank-deficient {deficient}"))?;
    Ok(format!("500 operators, {sampled} sampled, {deficient} rank-deficient"))
}

fn transpose_dense(op: &dyn LinearOperator) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(op.ncols(), op.nrows());
    for i in 0..op.nrows() {
        let mut e = vec![0.0; op.nrows()];
        e[i] = 1.0;
        out.column_mut(i).copy_from_slice(&op.apply_transpose_vec(&e));
    }
    out
}

fn fidelity_at(trial: usize, std: &StandardLp, it: &Iterate) -> Result<(), String> {
    let err = |e: qipm_bound::Error| e.to_string();
    let basis = select_basis(&std.a).map_err(err)?;
    let oracle = dense_systems(std, it, &basis);
    let nes = build_nes(std, it, 0.5).map_err(err)?;
    let mnes = build_mnes(std, it, &basis, 0.5).map_err(err)?;
    let fbar = build_fbar(&basis, &std.a, it).map_err(err)?;
    let v = null_space_matrix(&basis, &std.a).map_err(err)?;
    let oss = build_oss(std, it, &basis, 0.5).map_err(err)?;
    let pairs: [(&str, &dyn LinearOperator, &DMatrix<f64>); 5] = [
        ("NES", &nes, &oracle.nes),
        ("MNES", &mnes, &oracle.mnes),
        ("Fbar", &fbar, &oracle.fbar),
        ("V", &v, &oracle.v),
        ("OSS", &oss, &oracle.oss),
    ];
    for (name, op, dense) in pairs {
        let e = common::column_rel_diff(&assemble_dense(op), dense);
        check(e <= 1e-10, || format!("trial {trial}: {name} differs by {e:e}"))?;
        let e = common::column_rel_diff(&transpose_dense(op), &dense.transpose());
        check(e <= 1e-10, || format!("trial {trial}: {name} transpose differs by {e:e}"))?;
    }
    let identity_plus = DMatrix::identity(std.m(), std.m()) + &oracle.fbar * oracle.fbar.transpose();
    let e = common::column_rel_diff(&oracle.mnes, &identity_plus);
    check(e <= 1e-10, || format!("trial {trial}: dense MNES differs from I + Fbar Fbar^T by {e:e}"))
}

fn operator_fidelity() -> Outcome {
    for trial in 0..100 {
        let mut rng = common::rng(20_000 + trial as u64);
        let m = rng.random_range(1..=20);
        let n = rng.random_range(m..=40);
        let std = common::random_lp(&mut rng, m, n, 0.3);
        fidelity_at(trial, &std, &Iterate::canonical(m, n))?;
        let it = common::random_iterate(&mut rng, m, n);
        fidelity_at(trial, &std, &it)?;
    }
    Ok("100 instances at the canonical and a random iterate".into())
}

fn random_shape(rng: &mut rand_chacha::ChaCha8Rng) -> (usize, usize) {
    let m = rng.random_range(1..=15);
    (m, rng.random_range(m..=30))
}

fn feasibility_preservation() -> Outcome {
    let err = |e: qipm_bound::Error| e.to_string();
    let mut worst = [0.0f64; 3];
    for trial in 0..200 {
        let mut rng = common::rng(30_000 + trial as u64);
        let (m, n) = random_shape(&mut rng);
        let std = common::random_lp(&mut rng, m, n, 0.3);
        let it = common::random_iterate(&mut rng, m, n);
        let basis = select_basis(&std.a).map_err(err)?;
        let beta_mu = 0.5 * it.x.iter().zip(&it.s).map(|(x, s)| x * s).sum::<f64>() / n as f64;

        let w = common::random_vec(&mut rng, n);
        let step = recover_updates_oss(&std, &basis, &w).map_err(err)?;
        let ax = norm(&std.a.mul_vec(&step.dx));
        check(ax <= 1e-9, || format!("OSS trial {trial}: |A dx| = {ax:e}"))?;
        let atdy = std.a.mul_t_vec(&step.dy);
        check(step.ds.iter().zip(&atdy).all(|(ds, a)| *ds == -a), || format!("OSS trial {trial}: ds != -A^T dy"))?;
        worst[0] = worst[0].max(ax);

        let mnes = build_mnes(&std, &it, &basis, beta_mu).map_err(err)?;
        let z = common::random_vec(&mut rng, m);
        let mz = mnes.apply_vec(&z);
        let r_hat: Vec<f64> = (0..m).map(|k| mnes.rhs[k] - mz[k]).collect();
        let step = recover_updates_mnes(&std, &it, &basis, beta_mu, &z, &r_hat).map_err(err)?;
        let r = newton_residuals(&std, &it, beta_mu, &step);
        let (p, d) = (max_abs(&r.primal), max_abs(&r.dual));
        check(p <= 1e-9 && d <= 1e-9, || format!("MNES trial {trial}: primal {p:e}, dual {d:e}"))?;
        let dvec = it.d();
        let mut expect = vec![0.0; n];
        for (k, &j) in basis.basic.iter().enumerate() {
            expect[j] = it.s[j] * dvec[j] * r_hat[k];
        }
        let diff: Vec<f64> = r.complementarity.iter().zip(&expect).map(|(a, b)| a - b).collect();
        let c = max_abs(&diff);
        check(c <= 1e-9, || format!("MNES trial {trial}: complementarity residual off by {c:e}"))?;
        worst[1] = worst[1].max(p.max(d));

        let dy = common::random_vec(&mut rng, m);
        let step = recover_updates_nes(&std, &it, beta_mu, &dy).map_err(err)?;
        let r = newton_residuals(&std, &it, beta_mu, &step);
        let (d, c) = (max_abs(&r.dual), max_abs(&r.complementarity));
        check(d <= 1e-9 && c <= 1e-9, || format!("NES trial {trial}: dual {d:e}, complementarity {c:e}"))?;
        worst[2] = worst[2].max(d.max(c));
    }
    Ok(format!("200 trials each, worst residuals OSS {:.1e}, MNES {:.1e}, NES {:.1e}", worst[0], worst[1], worst[2]))
}

fn pattern_sparsity(rows: usize, cols: usize, nz: impl Fn(usize, usize) -> bool) -> u64 {
    let r = (0..rows).map(|i| (0..cols).filter(|&j| nz(i, j)).count()).max().unwrap_or(0);
    let c = (0..cols).map(|j| (0..rows).filter(|&i| nz(i, j)).count()).max().unwrap_or(0);
    r.max(c) as u64
}

fn corpus_files() -> Vec<std::path::PathBuf> {
    let mut out = Vec::new();
    let mut stack = vec![common::corpus("")];
    while let Some(dir) = stack.pop() {
        for e in std::fs::read_dir(&dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else if p.extension().is_some_and(|x| x == "mps") {
                out.push(p);
            }
        }
    }
    out.sort();
    out
}

fn pipeline_soundness() -> Outcome {
    let cfg = AnalysisConfig::default();
    let files = corpus_files();
    for path in &files {
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
        let p = prepare(&text, cfg.max_dense_rows).map_err(|f| format!("{name}: {} {}", f.stage, f.message))?;
        let (m, n) = (p.std.m(), p.std.n());
        let it = Iterate::canonical(m, n);
        let beta_mu = it.default_beta_mu();
        let err = |e: qipm_bound::Error| format!("{name}: {e}");

        let mnes_op = build_mnes(&p.std, &it, &p.basis, beta_mu).map_err(err)?;
        let mnes = assemble_dense(&mnes_op);
        let top = mnes.amax();
        let dense_s = pattern_sparsity(m, m, |i, j| mnes[(i, j)].abs() > 1e-9 * top);
        let s = measured_sparsity_mnes(&mnes_op, DEFAULT_PROBE_BUDGET).map_err(err)?;
        check(s.value == dense_s, || format!("{name} MNES: sparsity {} vs dense {dense_s}", s.value))?;
        let t = truth_of(&mnes);
        let est = qipm_bound::harness::analyze::formulation_difficulty(Formulation::Mnes, &p.std, &p.basis, &cfg, 1)
            .map_err(err)?;
        check(est.sparsity == dense_s, || format!("{name} MNES: reported sparsity {}", est.sparsity))?;
        let bound = dense_s as f64 * (t.max / t.min + 1e-9);
        check(est.gamma <= bound, || format!("{name} MNES: gamma {} > dense {bound}", est.gamma))?;

        let oss = assemble_dense(&build_oss(&p.std, &it, &p.basis, beta_mu).map_err(err)?);
        let g_top = p
            .basis
            .basic
            .iter()
            .flat_map(|&j| (m..n).map(move |c| (j, c)))
            .fold(0.0f64, |acc, (j, c)| acc.max(oss[(j, c)].abs()));
        let dense_s = pattern_sparsity(n, n, |j, c| {
            let v = oss[(j, c)].abs();
            if c < m || !p.basis.basic.contains(&j) {
                v != 0.0
            } else {
                v > 1e-9 * g_top
            }
        });
        let s = measured_sparsity_oss(&p.std.a, &p.basis, DEFAULT_PROBE_BUDGET).map_err(err)?;
        check(s.value == dense_s, || format!("{name} OSS: sparsity {} vs dense {dense_s}", s.value))?;
        let t = truth_of(&oss);
        let est = qipm_bound::harness::analyze::formulation_difficulty(Formulation::Oss, &p.std, &p.basis, &cfg, 1)
            .map_err(err)?;
        check(est.sparsity == dense_s, || format!("{name} OSS: reported sparsity {}", est.sparsity))?;
        let bound = dense_s as f64 * (t.max / t.min + 1e-9);
        check(est.gamma <= bound, || format!("{name} OSS: gamma {} > dense {bound}", est.gamma))?;
    }
    Ok(format!("{} corpus instances, both formulations", files.len()))
}

fn quantum_slower_at_marker() -> Outcome {
    let report = run_suite(&common::corpus(""), &AnalysisConfig::default()).map_err(|e| e.to_string())?;
    let marker = report.reference_marker;
    let at = report.durations.iter().position(|&t| t == marker).ok_or("marker missing from grid")?;
    let large: Vec<_> = report.records.iter().filter(|r| r.m.is_some_and(|m| m >= 10)).cloned().collect();
    check(!large.is_empty(), || "no corpus instance with m >= 10".into())?;
    let mut lines = Vec::new();
    for r in &large {
        let wall = r.classical_wall_time().ok_or_else(|| format!("{}: no classical time", r.name))?;
        check(r.classical.as_ref().is_some_and(|c| c.status == SolveStatus::Optimal), || format!("{}: classical not optimal", r.name))?;
        for f in Formulation::ALL {
            let rec = r.formulation(f).ok_or_else(|| format!("{}: {} missing", r.name, f.as_str()))?;
            let cycles = rec.total_cycles.as_ref().ok_or_else(|| format!("{} {}: no cycle count", r.name, f.as_str()))?;
            let quantum = runtime_lower_bound(cycles, 8e-10);
            check(quantum > wall, || format!("{} {}: quantum {quantum:e} s <= classical {wall:e} s", r.name, f.as_str()))?;
            check(!rec.quantum_lb_below_classical[at], || format!("{} {}: flagged below classical", r.name, f.as_str()))?;
            lines.push(quantum / wall);
        }
    }
    for c in exclusion_curve(&large, &report.durations) {
        check(c.fractions[at] == 0.0, || format!("curve {} {} is {} at the marker", c.family, c.formulation.as_str(), c.fractions[at]))?;
    }
    let min_ratio = lines.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(format!("{} instances with m >= 10, quantum/classical >= {min_ratio:.1e}", large.len()))
}

#[derive(Deserialize)]
struct General {
    name: String,
    mps: String,
    objective: f64,
}

#[derive(Deserialize)]
struct References {
    general: Vec<General>,
}

fn installed_solver() -> Option<ExternalConfig> {
    let on_path = |bin: &str| {
        std::env::var_os("PATH").is_some_and(|p| std::env::split_paths(&p).any(|d| d.join(bin).is_file()))
    };
    on_path("highs").then(|| ExternalConfig {
        command_template: "highs {mps}".into(),
        objective_pattern: r"Objective value\s*:\s*(\S+)".into(),
        status_pattern: r"Model status\s*:\s*(\w+)".into(),
        name: "highs".into(),
        ..Default::default()
    })
}

fn standard_form_equivalence() -> Outcome {
    let text = std::fs::read_to_string(common::data("lp_reference.json")).map_err(|e| e.to_string())?;
    let refs: References = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    check(refs.general.len() == 100, || format!("{} reference instances", refs.general.len()))?;
    let external = installed_solver();
    let work = tempfile::tempdir().map_err(|e| e.to_string())?;
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1.0);
    let mut worst = 0.0f64;
    for g in &refs.general {
        let p = prepare(&g.mps, 4000).map_err(|f| format!("{}: {} {}", g.name, f.stage, f.message))?;
        let out = solve_internal_ipm(&p.std, &IpmConfig::default());
        check(out.status == SolveStatus::Optimal, || format!("{}: IPM status {:?}", g.name, out.status))?;
        let e = rel(out.objective.unwrap(), g.objective);
        check(e <= 1e-6, || format!("{}: IPM {} vs reference {} ({e:e})", g.name, out.objective.unwrap(), g.objective))?;
        worst = worst.max(e);
        if let Some(cfg) = &external {
            let ext = solve_external(&p.std, cfg, work.path());
            let obj = ext.objective.ok_or_else(|| format!("{}: external solver gave no objective", g.name))?;
            check(rel(obj, g.objective) <= 1e-6, || format!("{}: external {obj} vs reference {}", g.name, g.objective))?;
        }
    }
    let solvers = if external.is_some() { "internal IPM and highs" } else { "internal IPM only, no external solver installed" };
    Ok(format!("100 instances, worst relative gap {worst:.1e} ({solvers})"))
}

/// CSV rows with the named columns removed.
fn strip_columns(text: &str, drop: &[&str]) -> Result<Vec<Vec<String>>, String> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let headers = rdr.headers().map_err(|e| e.to_string())?.clone();
    let keep: Vec<usize> = (0..headers.len()).filter(|&i| !drop.contains(&&headers[i])).collect();
    let mut rows = vec![keep.iter().map(|&i| headers[i].to_string()).collect()];
    for r in rdr.records() {
        let r = r.map_err(|e| e.to_string())?;
        rows.push(keep.iter().map(|&i| r[i].to_string()).collect());
    }
    Ok(rows)
}

fn determinism() -> Outcome {
    let cfg = AnalysisConfig { seed: 7, ..Default::default() };
    let run = || -> Result<(Vec<Vec<String>>, Vec<Vec<String>>), String> {
        let report = run_suite(&common::corpus(""), &cfg).map_err(|e| e.to_string())?;
        let records = strip_columns(&records_csv(&report).map_err(|e| e.to_string())?, &TIMING_COLUMNS)?;
        let curves = strip_columns(&curves_csv(&report).map_err(|e| e.to_string())?, &["fraction"])?;
        Ok((records, curves))
    };
    let (a, b) = (run()?, run()?);
    check(a.0 == b.0, || "records.csv differs between runs".into())?;
    check(a.1 == b.1, || "curves.csv differs between runs".into())?;
    Ok(format!("{} record rows identical outside timing columns", a.0.len() - 1))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Option<u64>); 8] = [
        ("formula exactness", formula_exactness, Some(10)),
        ("kappa soundness", kappa_soundness, Some(120)),
        ("operator fidelity", operator_fidelity, Some(60)),
        ("feasibility preservation", feasibility_preservation, None),
        ("pipeline soundness", pipeline_soundness, None),
        ("quantum slower than classical at the reference duration", quantum_slower_at_marker, None),
        ("standard-form equivalence", standard_form_equivalence, None),
        ("determinism", determinism, None),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.into_iter().enumerate() {
        let t = Instant::now();
        let result = run().and_then(|detail| within_budget(t.elapsed(), budget.map(Duration::from_secs)).map(|_| detail));
        let secs = t.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("criterion {}: PASS  {name} [{secs:.2} s] {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} [{secs:.2} s] {why}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
