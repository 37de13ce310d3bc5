//! Instance analysis, suites, exclusion curves, reports and the CLI.

mod common;

use std::path::Path;
use std::process::Command;

use num_bigint::BigUint;
use proptest::prelude::*;
use qipm_bound::classical::SolveStatus;
use qipm_bound::cost::{runtime_below, total_quantum_cycles_sk};
use qipm_bound::harness::report::{difficulty_svg, exclusion_svg, records_csv, DIFFICULTY_SVG, EXCLUSION_SVG};
use qipm_bound::harness::{
    analyze_instance, emit_report, exclusion_curve, instance_seed, load_report_json, run_suite, AnalysisConfig,
    Format, Formulation, InstanceRecord,
};

const MIN_X: &str = "NAME minx\nROWS\n N obj\n G c\nCOLUMNS\n x obj 1 c 1\nRHS\n R c 1\nENDATA\n";
/// Two equality rows over three columns, so `n − m < m`.
const CHAIN: &str = "NAME chain\nROWS\n N obj\n E a\n E b\nCOLUMNS\n x obj 1 a 1\n y obj 1 a 1\n y b 1\n z obj 1 b 1\nRHS\n R a 1 b 1\nENDATA\n";

fn write(dir: &Path, rel: &str, text: &str) {
    let p = dir.join(rel);
    std::fs::create_dir_all(p.parent().unwrap()).unwrap();
    std::fs::write(p, text).unwrap();
}

fn quick_config() -> AnalysisConfig {
    AnalysisConfig { sigma_min_samples: 500, ..Default::default() }
}

fn analyze_text(text: &str, cfg: &AnalysisConfig) -> InstanceRecord {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "i.mps", text);
    analyze_instance(&dir.path().join("i.mps"), "i.mps", "misc", cfg, instance_seed(cfg.seed, "i.mps"))
}

#[test]
fn single_surplus_instance_end_to_end() {
    let rec = analyze_text(MIN_X, &quick_config());
    assert!(!rec.errored(), "{rec:?}");
    assert_eq!((rec.m, rec.n), (Some(1), Some(2)));
    let mnes = rec.mnes.as_ref().unwrap();
    assert_eq!(mnes.d, 1);
    assert!(mnes.degenerate);
    assert_eq!(mnes.total_cycles, Some(BigUint::ZERO));
    let oss = rec.oss.as_ref().unwrap();
    let diff = oss.difficulty.as_ref().unwrap();
    assert_eq!(oss.d, 2);
    assert!(diff.gamma >= 2.0);
    let expect = total_quantum_cycles_sk(2, diff.sparsity, diff.kappa_lower, 0.1).unwrap();
    assert_eq!(oss.total_cycles.as_ref(), Some(&expect.cycles));
    assert!(oss.query_count.is_some());
    let classical = rec.classical.as_ref().unwrap();
    assert_eq!(classical.status, SolveStatus::Optimal);
    assert!((classical.objective.unwrap() - 1.0).abs() < 1e-6);
    assert!(rec.classical_internal_baseline);
    assert_eq!(oss.quantum_lb_below_classical.len(), quick_config().durations.durations().unwrap().len());
    for stage in ["read", "parse", "classical"] {
        assert!(rec.stage_times.iter().any(|s| s.stage == stage), "{stage}");
    }
}

#[test]
fn failed_estimation_spares_the_other_formulation() {
    let cfg = AnalysisConfig { sigma_min_timeout_s: 0.0, sigma_min_samples: 0, ..Default::default() };
    let rec = analyze_text(CHAIN, &cfg);
    assert_eq!((rec.m, rec.n), (Some(2), Some(3)));
    let mnes = rec.mnes.as_ref().unwrap();
    assert!(mnes.failure.is_none());
    assert!(mnes.total_cycles.is_some());
    let oss = rec.oss.as_ref().unwrap();
    assert_eq!(oss.failure.as_ref().unwrap().stage, "difficulty");
    assert!(oss.total_cycles.is_none());
    assert!(rec.errored());
}

#[test]
fn repeated_analysis_is_identical() {
    let cfg = quick_config();
    let path = common::corpus("flow/mincost_flow.mps");
    let run = || {
        let rec = analyze_instance(&path, "flow/mincost_flow.mps", "flow", &cfg, 42).without_timings();
        serde_json::to_string(&rec).unwrap()
    };
    assert_eq!(run(), run());
}

#[test]
fn unreadable_and_malformed_files_become_records() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.mps"), [0xff, 0xfe, 0x00]).unwrap();
    write(dir.path(), "broken.mps", "NAME x\nROWS\n N obj\n");
    let cfg = quick_config();
    let bad = analyze_instance(&dir.path().join("bad.mps"), "bad.mps", "misc", &cfg, 1);
    assert_eq!(bad.failure.unwrap().stage, "read");
    let broken = analyze_instance(&dir.path().join("broken.mps"), "broken.mps", "misc", &cfg, 1);
    assert_eq!(broken.failure.unwrap().stage, "parse");
    let missing = analyze_instance(&dir.path().join("nope.mps"), "nope.mps", "misc", &cfg, 1);
    assert!(missing.errored());
}

#[test]
fn families_and_denominators() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a/one.mps", MIN_X);
    write(dir.path(), "a/two.mps", CHAIN);
    write(dir.path(), "b/three.mps", MIN_X);
    let report = run_suite(dir.path(), &quick_config()).unwrap();
    assert_eq!(report.records.len(), 3);
    assert_eq!(report.curves.len(), 4);
    for c in &report.curves {
        let expect = if c.family == "a" { 2 } else { 1 };
        assert_eq!((c.n_analyzed, c.n_excluded), (expect, 0), "{} {:?}", c.family, c.formulation);
    }
    assert_eq!(report.records[0].name, "a/one.mps");
    assert!(report.warnings.is_empty());
}

#[test]
fn errored_instance_leaves_the_denominator() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a/one.mps", MIN_X);
    write(dir.path(), "a/two.mps", CHAIN);
    write(dir.path(), "a/broken.mps", "NAME x\nROWS\n N obj\n");
    let report = run_suite(dir.path(), &quick_config()).unwrap();
    assert_eq!(report.errored(), 1);
    for c in &report.curves {
        assert_eq!((c.n_analyzed, c.n_excluded), (2, 1));
    }
    assert!(report.warnings.iter().any(|w| w.contains("excluded")));
}

#[test]
fn empty_directory_gives_empty_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_suite(dir.path(), &quick_config()).unwrap();
    assert!(report.records.is_empty() && report.curves.is_empty());
    assert_eq!(report.warnings.len(), 1);
    let csv = records_csv(&report).unwrap();
    assert_eq!(csv.lines().count(), 1);
    assert!(csv.starts_with("name,family,formulation"));
}

#[test]
fn suite_is_independent_of_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a/one.mps", MIN_X);
    write(dir.path(), "a/two.mps", CHAIN);
    write(dir.path(), "b/three.mps", MIN_X);
    let strip = |workers| {
        let cfg = AnalysisConfig { workers, ..quick_config() };
        let r = run_suite(dir.path(), &cfg).unwrap();
        r.records.iter().map(|x| serde_json::to_string(&x.without_timings()).unwrap()).collect::<Vec<_>>()
    };
    assert_eq!(strip(1), strip(3));
}

/// A record from a real analysis with its cycle count and classical time
/// replaced.
fn synthetic(family: &str, name: &str, cycles: u64, wall: f64) -> InstanceRecord {
    let mut rec = analyze_text(MIN_X, &quick_config());
    rec.family = family.into();
    rec.name = name.into();
    rec.classical.as_mut().unwrap().wall_time_s = wall;
    for f in [rec.mnes.as_mut().unwrap(), rec.oss.as_mut().unwrap()] {
        f.total_cycles = Some(BigUint::from(cycles));
    }
    rec
}

#[test]
fn single_record_curve_steps_at_threshold() {
    let rec = synthetic("f", "r", 4800, 1.0);
    let t0 = 1.0 / 4800.0;
    let grid = [t0 * 0.5, t0 * 0.999, t0 * 1.001, t0 * 2.0];
    let curves = exclusion_curve(&[rec], &grid);
    for c in curves {
        assert_eq!(c.fractions, vec![1.0, 1.0, 0.0, 0.0]);
    }
}

#[test]
fn dominant_cycles_give_zero_curve() {
    let rec = synthetic("f", "r", 10u64.pow(15), 1.0);
    let curves = exclusion_curve(&[rec], &[1e-15 * 1.5, 1e-9, 1e-3]);
    assert!(curves.iter().all(|c| c.fractions.iter().all(|f| *f == 0.0)));
}

#[test]
fn two_records_step_through_one_half() {
    let recs = [synthetic("f", "a", 1000, 1.0), synthetic("f", "b", 100, 1.0)];
    let curves = exclusion_curve(&recs, &[1e-4, 5e-4, 5e-3, 5e-2]);
    assert_eq!(curves[0].fractions, vec![1.0, 1.0, 0.5, 0.0]);
}

#[test]
fn reports_are_regenerable() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a/one.mps", MIN_X);
    write(dir.path(), "a/two.mps", CHAIN);
    write(dir.path(), "b/three.mps", MIN_X);
    let report = run_suite(dir.path(), &quick_config()).unwrap();
    let out = tempfile::tempdir().unwrap();
    let files = emit_report(&report, &[Format::Csv, Format::Json, Format::Svg], out.path()).unwrap();
    assert_eq!(files.len(), 5);

    let csv = std::fs::read_to_string(out.path().join("records.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 6);

    let loaded = load_report_json(&out.path().join("report.json")).unwrap();
    assert_eq!(loaded, report);
    assert_eq!(difficulty_svg(&loaded), std::fs::read_to_string(out.path().join(DIFFICULTY_SVG)).unwrap());
    assert_eq!(exclusion_svg(&loaded), std::fs::read_to_string(out.path().join(EXCLUSION_SVG)).unwrap());
    assert!(exclusion_svg(&loaded).contains("<svg"));
}

#[test]
fn curves_recompute_from_csv() {
    let report = run_suite(&common::corpus(""), &quick_config()).unwrap();
    let out = tempfile::tempdir().unwrap();
    emit_report(&report, &[Format::Csv], out.path()).unwrap();
    let mut records = csv::Reader::from_path(out.path().join("records.csv")).unwrap();
    let headers = records.headers().unwrap().clone();
    let col = |name: &str| headers.iter().position(|h| h == name).unwrap();
    let rows: Vec<csv::StringRecord> = records.records().map(|r| r.unwrap()).collect();
    let mut curves = csv::Reader::from_path(out.path().join("curves.csv")).unwrap();
    let mut checked = 0;
    for row in curves.records() {
        let row = row.unwrap();
        let (family, formulation) = (&row[0], &row[1]);
        let t: f64 = row[2].parse().unwrap();
        let fraction: f64 = row[3].parse().unwrap();
        let usable: Vec<(BigUint, f64)> = rows
            .iter()
            .filter(|r| &r[col("family")] == family && &r[col("formulation")] == formulation)
            .filter(|r| &r[col("classical_status")] == "optimal" && !r[col("total_cycles")].is_empty())
            .map(|r| (r[col("total_cycles")].parse().unwrap(), r[col("classical_wall_time_s")].parse().unwrap()))
            .collect();
        assert_eq!(usable.len(), row[4].parse::<usize>().unwrap());
        let below = usable.iter().filter(|(c, w)| runtime_below(c, t, *w)).count();
        assert_eq!(below as f64 / usable.len() as f64, fraction);
        checked += 1;
    }
    assert_eq!(checked, report.curves.len() * report.durations.len());
}

#[test]
fn config_file_round_trip() {
    let cfg = AnalysisConfig::from_toml("seed = 5\nepsilon = 0.01\n[durations]\npoints = 11\n").unwrap();
    assert_eq!((cfg.seed, cfg.epsilon, cfg.durations.points), (5, 0.01, 11));
    assert!(AnalysisConfig::from_toml("sede = 5\n").is_err());
    assert!(AnalysisConfig::from_toml("epsilon = 1.5\n").is_err());
    assert_ne!(cfg.hash(), AnalysisConfig::default().hash());
}

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qipm-bound"))
}

#[test]
fn cli_analyze_prints_json() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "minx.mps", MIN_X);
    let out = cli()
        .args(["analyze", "--sigma-min-samples", "200"])
        .arg(dir.path().join("minx.mps"))
        .env_remove("QIPM_BOUND_CONFIG")
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rec: InstanceRecord = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rec.name, "minx.mps");
    assert!(rec.oss.unwrap().total_cycles.is_some());
}

#[test]
fn cli_suite_exit_codes_and_config_variable() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "ok/minx.mps", MIN_X);
    let out_dir = dir.path().join("out");
    let cfg_path = dir.path().join("cfg.toml");
    std::fs::write(&cfg_path, "sigma_min_samples = 200\n[durations]\npoints = 5\n").unwrap();
    let status = cli()
        .args(["suite", "--formats", "csv,json"])
        .arg(dir.path().join("ok"))
        .arg("--out")
        .arg(&out_dir)
        .env("QIPM_BOUND_CONFIG", &cfg_path)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report = load_report_json(&out_dir.join("report.json")).unwrap();
    assert_eq!(report.durations.len(), 6);
    assert!(!out_dir.join("exclusion.svg").exists());

    write(dir.path(), "ok/broken.mps", "NAME x\n");
    let status = cli()
        .args(["suite", "--formats", "csv"])
        .arg(dir.path().join("ok"))
        .arg("--out")
        .arg(&out_dir)
        .env("QIPM_BOUND_CONFIG", &cfg_path)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    let out = cli().args(["suite", "--formats", "pdf"]).arg(dir.path()).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown report format"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn curves_are_nonincreasing(cycles in proptest::collection::vec((1u64..1u64 << 50, 1e-6f64..10.0), 1..6)) {
        let template = synthetic("f", "x", 1, 1.0);
        let recs: Vec<InstanceRecord> = cycles
            .iter()
            .enumerate()
            .map(|(i, &(c, w))| {
                let mut r = template.clone();
                r.name = format!("r{i}");
                r.classical.as_mut().unwrap().wall_time_s = w;
                for f in [r.mnes.as_mut().unwrap(), r.oss.as_mut().unwrap()] {
                    f.total_cycles = Some(BigUint::from(c));
                }
                r
            })
            .collect();
        let grid = quick_config().durations.durations().unwrap();
        for c in exclusion_curve(&recs, &grid) {
            prop_assert_eq!(c.fractions.len(), grid.len());
            prop_assert!(c.fractions.windows(2).all(|w| w[1] <= w[0]));
            prop_assert!(c.fractions.iter().all(|f| (0.0..=1.0).contains(f)));
        }
    }
}

#[test]
fn formulation_order_is_stable() {
    assert_eq!(Formulation::ALL.map(Formulation::as_str), ["mnes", "oss"]);
}
