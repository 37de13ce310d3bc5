//! Removal of linearly dependent rows.
//!
//! Rows are eliminated in order against the previously accepted rows, each
//! accepted row pivoting on its largest remaining entry (lowest column index
//! on ties). A row whose reduced entries all fall below `1e-10` times its
//! original max-norm is dependent; its right-hand side must reduce to zero
//! within `1e-9` relative, otherwise the system is inconsistent.

use serde::{Deserialize, Serialize};

use crate::error::Verdict;
use crate::lp::StandardLp;

pub const PIVOT_TOL: f64 = 1e-10;
pub const CONSISTENCY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankRepair {
    pub lp: StandardLp,
    /// Indices of dropped rows in the input.
    pub dropped: Vec<usize>,
}

struct Pivot {
    col: usize,
    value: f64,
    entries: Vec<(usize, f64)>,
    rhs: f64,
}

pub fn ensure_full_row_rank(std: &StandardLp) -> Result<RankRepair, Verdict> {
    let m = std.m();
    let n = std.n();
    let mut pivots: Vec<Pivot> = Vec::new();
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    let mut acc = vec![0.0; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut mark = vec![false; n];

    for i in 0..m {
        let row = std.a.row(i);
        let norm = row.norm_inf();
        for (j, v) in row.iter() {
            acc[j] = v;
            mark[j] = true;
            touched.push(j);
        }
        let mut rhs = std.b[i];
        // Eliminate in acceptance order; later pivots never reintroduce
        // earlier pivot columns.
        for p in &pivots {
            let a = acc[p.col];
            if a == 0.0 {
                continue;
            }
            let f = a / p.value;
            for &(j, v) in &p.entries {
                if !mark[j] {
                    mark[j] = true;
                    touched.push(j);
                }
                acc[j] -= f * v;
            }
            acc[p.col] = 0.0;
            rhs -= f * p.rhs;
        }
        let mut best: Option<(usize, f64)> = None;
        for &j in &touched {
            let v = acc[j].abs();
            if v > 0.0 {
                match best {
                    Some((bj, bv)) if v < bv || (v == bv && j > bj) => {}
                    _ => best = Some((j, v)),
                }
            }
        }
        let independent = matches!(best, Some((_, v)) if v > PIVOT_TOL * norm);
        if independent {
            let col = best.unwrap().0;
            let mut entries: Vec<(usize, f64)> =
                touched.iter().filter(|&&j| acc[j] != 0.0).map(|&j| (j, acc[j])).collect();
            entries.sort_by_key(|e| e.0);
            pivots.push(Pivot { col, value: acc[col], entries, rhs });
            kept.push(i);
        } else {
            if rhs.abs() > CONSISTENCY_TOL * std.b[i].abs().max(1.0) {
                return Err(Verdict::Infeasible(format!(
                    "row {i} is a combination of earlier rows with inconsistent rhs (residual {rhs:e})"
                )));
            }
            dropped.push(i);
        }
        for &j in &touched {
            acc[j] = 0.0;
            mark[j] = false;
        }
        touched.clear();
    }

    let lp = if dropped.is_empty() {
        std.clone()
    } else {
        StandardLp {
            a: std.a.select_rows(&kept),
            b: kept.iter().map(|&i| std.b[i]).collect(),
            c: std.c.clone(),
            provenance: std.provenance.clone(),
            objective_sign: std.objective_sign,
            objective_offset: std.objective_offset,
        }
    };
    Ok(RankRepair { lp, dropped })
}
