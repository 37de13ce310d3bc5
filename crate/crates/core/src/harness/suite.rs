//! Suite runs and exclusion curves.

use std::collections::BTreeMap;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::analyze::{analyze_instance, empty_record, family_and_name, Failure, Formulation, InstanceRecord};
use super::config::{instance_seed, AnalysisConfig};
use crate::cost::runtime_below;
use crate::error::{Error, Result};

/// Fraction of analyzed instances whose quantum lower bound lies below the
/// classical time, per cycle duration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub family: String,
    pub formulation: Formulation,
    /// Instances with both a cycle count and a classical time.
    pub n_analyzed: usize,
    /// Instances of the family left out of the denominator because a stage failed.
    pub n_excluded: usize,
    /// Aligned with the report's durations.
    pub fractions: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub config: AnalysisConfig,
    pub config_hash: String,
    pub durations: Vec<f64>,
    pub reference_marker: f64,
    pub records: Vec<InstanceRecord>,
    pub curves: Vec<Curve>,
    pub warnings: Vec<String>,
}

impl SuiteReport {
    pub fn errored(&self) -> usize {
        self.records.iter().filter(|r| r.errored()).count()
    }
}

/// Curves per family and formulation, families in lexicographic order.
pub fn exclusion_curve(records: &[InstanceRecord], durations: &[f64]) -> Vec<Curve> {
    let mut families: BTreeMap<&str, Vec<&InstanceRecord>> = BTreeMap::new();
    for r in records {
        families.entry(r.family.as_str()).or_default().push(r);
    }
    let mut curves = Vec::new();
    for (family, recs) in families {
        for f in Formulation::ALL {
            let usable: Vec<_> = recs
                .iter()
                .filter_map(|r| {
                    let cycles = r.formulation(f)?.total_cycles.as_ref()?;
                    Some((cycles, r.classical_wall_time()?))
                })
                .collect();
            let n_analyzed = usable.len();
            let fractions = if n_analyzed == 0 {
                Vec::new()
            } else {
                durations
                    .iter()
                    .map(|&t| {
                        let below = usable.iter().filter(|(c, w)| runtime_below(c, t, *w)).count();
                        below as f64 / n_analyzed as f64
                    })
                    .collect()
            };
            curves.push(Curve {
                family: family.to_string(),
                formulation: f,
                n_analyzed,
                n_excluded: recs.len() - n_analyzed,
                fractions,
            });
        }
    }
    curves
}

fn collect_mps(dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_dir() {
            collect_mps(&path, out)?;
        } else if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("mps")) {
            out.push(path);
        }
    }
    Ok(())
}

/// MPS files below `dir`, sorted by path.
pub fn find_instances(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    collect_mps(dir, &mut out)?;
    out.sort();
    Ok(out)
}

fn panic_message(p: Box<dyn std::any::Any + Send>) -> String {
    p.downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| p.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "unknown panic".to_string())
}

/// Analyzes every instance below `dir` and aggregates the curves.
pub fn run_suite(dir: &Path, cfg: &AnalysisConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let durations = cfg.durations.durations()?;
    let paths = find_instances(dir)?;
    let mut warnings = Vec::new();
    if paths.is_empty() {
        warnings.push(format!("no MPS files found below {}", dir.display()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;
    let mut records: Vec<InstanceRecord> = pool.install(|| {
        paths
            .par_iter()
            .map(|path| {
                let (family, name) = family_and_name(dir, path);
                let seed = instance_seed(cfg.seed, &name);
                log::info!("analyzing {name}");
                catch_unwind(AssertUnwindSafe(|| analyze_instance(path, &name, &family, cfg, seed))).unwrap_or_else(
                    |p| {
                        let mut r = empty_record(&name, &family, path, cfg, seed);
                        r.failure = Some(Failure::new("panic", panic_message(p)));
                        r
                    },
                )
            })
            .collect()
    });
    records.sort_by(|a, b| a.name.cmp(&b.name));
    let curves = exclusion_curve(&records, &durations);
    for c in &curves {
        if c.n_excluded > 0 {
            warnings.push(format!(
                "family {} / {}: {} instance(s) excluded from the denominator after failures",
                c.family,
                c.formulation.as_str(),
                c.n_excluded
            ));
        }
    }
    Ok(SuiteReport {
        config: cfg.clone(),
        config_hash: cfg.hash(),
        durations,
        reference_marker: cfg.durations.marker,
        records,
        curves,
        warnings,
    })
}
