//! CSV, JSON and SVG output of a suite report.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::analyze::{Formulation, InstanceRecord};
use super::suite::SuiteReport;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Format {
    Csv,
    Json,
    Svg,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Format> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "svg" => Ok(Format::Svg),
            other => Err(Error::Config(format!("unknown report format {other:?}"))),
        }
    }
}

pub const RECORDS_CSV: &str = "records.csv";
pub const CURVES_CSV: &str = "curves.csv";
pub const REPORT_JSON: &str = "report.json";
pub const DIFFICULTY_SVG: &str = "difficulty.svg";
pub const EXCLUSION_SVG: &str = "exclusion.svg";

/// Columns of `records.csv`, one row per instance and formulation.
pub const RECORD_COLUMNS: [&str; 31] = [
    "name",
    "family",
    "formulation",
    "failure_stage",
    "failure_message",
    "original_rows",
    "original_cols",
    "m",
    "n",
    "d",
    "sparsity",
    "sparsity_rule",
    "generic_sparsity",
    "kappa_lower",
    "gamma",
    "sigma_max_lb",
    "sigma_min_ub",
    "sigma_min_method",
    "clamped",
    "singular",
    "query_count",
    "total_cycles",
    "degenerate",
    "classical_status",
    "classical_objective",
    "classical_solver",
    "classical_wall_time_s",
    "serialization_time_s",
    "difficulty_elapsed_s",
    "break_even_duration_s",
    "seed",
];

/// Columns holding measured times or values derived from them.
pub const TIMING_COLUMNS: [&str; 4] =
    ["classical_wall_time_s", "serialization_time_s", "difficulty_elapsed_s", "break_even_duration_s"];

/// Shortest round-trip text; exponent form outside `[1e-4, 1e15)`.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e15).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn opt_f(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn enum_text<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string).or_else(|| Some(v.to_string())))
        .unwrap_or_default()
}

fn record_rows(r: &InstanceRecord) -> Vec<Vec<String>> {
    Formulation::ALL
        .iter()
        .map(|&f| {
            let fr = r.formulation(f);
            let diff = fr.and_then(|x| x.difficulty.as_ref());
            let failure = r.failure.as_ref().or(fr.and_then(|x| x.failure.as_ref()));
            let cl = r.classical.as_ref();
            let cycles = fr.and_then(|x| x.total_cycles.as_ref());
            let break_even = match (cycles, r.classical_wall_time()) {
                (Some(c), Some(w)) if c.bits() > 0 => {
                    Some(w / crate::cost::runtime_lower_bound(c, 1.0))
                }
                _ => None,
            };
            vec![
                r.name.clone(),
                r.family.clone(),
                f.as_str().to_string(),
                failure.map(|x| x.stage.clone()).unwrap_or_default(),
                failure.map(|x| x.message.clone()).unwrap_or_default(),
                opt(r.original_rows),
                opt(r.original_cols),
                opt(r.m),
                opt(r.n),
                opt(fr.map(|x| x.d)),
                opt(diff.map(|d| d.sparsity)),
                diff.map(|d| enum_text(&d.sparsity_rule)).unwrap_or_default(),
                opt(diff.map(|d| d.generic_sparsity)),
                opt_f(diff.map(|d| d.kappa_lower)),
                opt_f(diff.map(|d| d.gamma)),
                opt_f(diff.map(|d| d.sigma_max_lb)),
                opt_f(diff.map(|d| d.sigma_min_ub)),
                diff.map(|d| enum_text(&d.sigma_min_method)).unwrap_or_default(),
                opt(diff.map(|d| d.clamped)),
                opt(diff.map(|d| d.singular)),
                opt(fr.and_then(|x| x.query_count.as_ref())),
                opt(cycles),
                opt(fr.map(|x| x.degenerate)),
                cl.map(|c| enum_text(&c.status)).unwrap_or_default(),
                opt_f(cl.and_then(|c| c.objective)),
                cl.map(|c| match &c.solver {
                    crate::classical::SolverKind::InternalIpm => "internal_ipm".to_string(),
                    crate::classical::SolverKind::External(n) => format!("external:{n}"),
                })
                .unwrap_or_default(),
                opt_f(cl.map(|c| c.wall_time_s)),
                opt_f(cl.and_then(|c| c.serialization_time_s)),
                opt_f(diff.map(|d| d.elapsed_s)),
                opt_f(break_even),
                r.metadata.seed.to_string(),
            ]
        })
        .collect()
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::io(path, std::io::Error::other(e.to_string()))
}

pub fn records_csv(report: &SuiteReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let p = Path::new(RECORDS_CSV);
    w.write_record(RECORD_COLUMNS).map_err(|e| csv_err(p, e))?;
    for r in &report.records {
        for row in record_rows(r) {
            w.write_record(&row).map_err(|e| csv_err(p, e))?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::io(p, std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

/// `family, formulation, duration_s, fraction, n_analyzed, n_excluded, marker`
pub fn curves_csv(report: &SuiteReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let p = Path::new(CURVES_CSV);
    w.write_record(["family", "formulation", "duration_s", "fraction", "n_analyzed", "n_excluded", "marker"])
        .map_err(|e| csv_err(p, e))?;
    for c in &report.curves {
        for (t, f) in report.durations.iter().zip(&c.fractions) {
            w.write_record([
                c.family.clone(),
                c.formulation.as_str().to_string(),
                fmt_f64(*t),
                fmt_f64(*f),
                c.n_analyzed.to_string(),
                c.n_excluded.to_string(),
                (*t == report.reference_marker).to_string(),
            ])
            .map_err(|e| csv_err(p, e))?;
        }
    }
    let bytes = w.into_inner().map_err(|e| Error::io(p, std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
}

pub fn report_json(report: &SuiteReport) -> Result<String> {
    serde_json::to_string_pretty(report).map_err(|e| Error::Config(format!("cannot serialize report: {e}")))
}

pub fn load_report_json(path: &Path) -> Result<SuiteReport> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];

fn svg_open(out: &mut String, w: f64, h: f64, title: &str) {
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(out, r#"<rect width="{w:.0}" height="{h:.0}" fill="white"/>"#);
    let _ = writeln!(out, r#"<text x="{:.1}" y="18" text-anchor="middle" font-size="13">{}</text>"#, w / 2.0, esc(title));
}

fn esc(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

/// Strip plot of `log10 γ` per family and formulation.
pub fn difficulty_svg(report: &SuiteReport) -> String {
    let mut groups: Vec<(String, Formulation, Vec<f64>)> = Vec::new();
    for c in &report.curves {
        let vals: Vec<f64> = report
            .records
            .iter()
            .filter(|r| r.family == c.family)
            .filter_map(|r| r.formulation(c.formulation)?.difficulty.as_ref().map(|d| d.gamma))
            .filter(|g| g.is_finite() && *g > 0.0)
            .map(f64::log10)
            .collect();
        groups.push((c.family.clone(), c.formulation, vals));
    }
    let (left, right, top, bottom) = (60.0, 20.0, 30.0, 90.0);
    let col_w = 50.0;
    let w = left + right + col_w * groups.len().max(1) as f64;
    let h = 400.0;
    let all: Vec<f64> = groups.iter().flat_map(|g| g.2.iter().copied()).collect();
    let lo = all.iter().copied().fold(f64::INFINITY, f64::min).floor().min(0.0);
    let hi = all.iter().copied().fold(f64::NEG_INFINITY, f64::max).ceil().max(lo + 1.0);
    let y = |v: f64| top + (h - top - bottom) * (1.0 - (v - lo) / (hi - lo));
    let mut out = String::new();
    svg_open(&mut out, w, h, "Difficulty s*kappa per family (log scale)");
    let _ = writeln!(out, r#"<line x1="{left}" y1="{top}" x2="{left}" y2="{:.1}" stroke="black"/>"#, h - bottom);
    let mut dec = lo;
    while dec <= hi + 1e-9 {
        let yy = y(dec);
        let _ = writeln!(
            out,
            r##"<line x1="{:.1}" y1="{yy:.1}" x2="{:.1}" y2="{yy:.1}" stroke="#dddddd"/><text x="{:.1}" y="{:.1}" text-anchor="end">1e{:.0}</text>"##,
            left,
            w - right,
            left - 4.0,
            yy + 4.0,
            dec
        );
        dec += 1.0;
    }
    for (k, (family, f, vals)) in groups.iter().enumerate() {
        let cx = left + col_w * (k as f64 + 0.5);
        let color = PALETTE[if *f == Formulation::Mnes { 0 } else { 1 }];
        for (i, v) in vals.iter().enumerate() {
            let jitter = ((i % 7) as f64 - 3.0) * 3.0;
            let _ = writeln!(
                out,
                r#"<circle cx="{:.1}" cy="{:.1}" r="3" fill="{color}" fill-opacity="0.7"/>"#,
                cx + jitter,
                y(*v)
            );
        }
        let _ = writeln!(
            out,
            r#"<text transform="translate({cx:.1},{:.1}) rotate(-60)" text-anchor="end">{} {}</text>"#,
            h - bottom + 12.0,
            esc(family),
            f.as_str()
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Exclusion fraction against cycle duration with the reference marker.
pub fn exclusion_svg(report: &SuiteReport) -> String {
    let (w, h) = (720.0, 420.0);
    let (left, right, top, bottom) = (60.0, 200.0, 30.0, 50.0);
    let mut out = String::new();
    svg_open(&mut out, w, h, "Fraction of instances with quantum lower bound below classical time");
    let ds = &report.durations;
    let (lo, hi) = match (ds.first(), ds.last()) {
        (Some(a), Some(b)) if b > a => (a.log10(), b.log10()),
        (Some(a), _) => (a.log10() - 1.0, a.log10() + 1.0),
        _ => (-15.0, -3.0),
    };
    let x = |t: f64| left + (w - left - right) * (t.log10() - lo) / (hi - lo);
    let y = |f: f64| top + (h - top - bottom) * (1.0 - f);
    let _ = writeln!(
        out,
        r#"<rect x="{left}" y="{top}" width="{:.1}" height="{:.1}" fill="none" stroke="black"/>"#,
        w - left - right,
        h - top - bottom
    );
    for f in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let _ = writeln!(out, r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{f:.2}</text>"#, left - 4.0, y(f) + 4.0);
    }
    let mut dec = lo.ceil();
    while dec <= hi + 1e-9 {
        let xx = x(10f64.powf(dec));
        let _ = writeln!(
            out,
            r#"<text x="{xx:.1}" y="{:.1}" text-anchor="middle">1e{dec:.0}</text>"#,
            h - bottom + 16.0
        );
        dec += 3.0;
    }
    let _ = writeln!(
        out,
        r#"<text x="{:.1}" y="{:.1}" text-anchor="middle">cycle duration [s]</text>"#,
        left + (w - left - right) / 2.0,
        h - 10.0
    );
    let mx = x(report.reference_marker);
    let _ = writeln!(
        out,
        r#"<line x1="{mx:.1}" y1="{top}" x2="{mx:.1}" y2="{:.1}" stroke="black" stroke-dasharray="4,3"/>"#,
        h - bottom
    );
    for (k, c) in report.curves.iter().filter(|c| !c.fractions.is_empty()).enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let dash = if c.formulation == Formulation::Oss { r#" stroke-dasharray="6,2""# } else { "" };
        let mut pts = String::new();
        for (i, (t, f)) in ds.iter().zip(&c.fractions).enumerate() {
            if i > 0 {
                // step: hold the previous fraction up to this duration
                let _ = write!(pts, "{:.1},{:.1} ", x(*t), y(c.fractions[i - 1]));
            }
            let _ = write!(pts, "{:.1},{:.1} ", x(*t), y(*f));
        }
        let _ = writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"{dash}/>"#,
            pts.trim_end()
        );
        let ly = top + 14.0 * k as f64 + 6.0;
        let _ = writeln!(
            out,
            r#"<line x1="{:.1}" y1="{ly:.1}" x2="{:.1}" y2="{ly:.1}" stroke="{color}" stroke-width="1.5"{dash}/><text x="{:.1}" y="{:.1}">{} {} (n={})</text>"#,
            w - right + 10.0,
            w - right + 30.0,
            w - right + 34.0,
            ly + 4.0,
            esc(&c.family),
            c.formulation.as_str(),
            c.n_analyzed
        );
    }
    out.push_str("</svg>\n");
    out
}

/// Writes the requested formats into `dir` and returns the written paths.
pub fn emit_report(report: &SuiteReport, formats: &[Format], dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let mut put = |name: &str, content: String| -> Result<()> {
        let path = dir.join(name);
        std::fs::write(&path, content).map_err(|e| Error::io(&path, e))?;
        written.push(path);
        Ok(())
    };
    for f in formats {
        match f {
            Format::Csv => {
                put(RECORDS_CSV, records_csv(report)?)?;
                put(CURVES_CSV, curves_csv(report)?)?;
            }
            Format::Json => put(REPORT_JSON, report_json(report)?)?,
            Format::Svg => {
                put(DIFFICULTY_SVG, difficulty_svg(report))?;
                put(EXCLUSION_SVG, exclusion_svg(report))?;
            }
        }
    }
    Ok(written)
}
