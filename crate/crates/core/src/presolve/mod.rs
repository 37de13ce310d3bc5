//! Reduction of a [`GeneralLp`] to a full-row-rank [`StandardLp`].
//!
//! The pipeline order is `presolve → to_standard_form → ensure_full_row_rank`.
//! Presolve removes empty rows, empty columns, fixed columns and rows that
//! are exact scalar multiples of each other.

mod rank;
mod standard;

pub use rank::{ensure_full_row_rank, RankRepair};
pub use standard::to_standard_form;

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::Verdict;
use crate::lp::{Column, GeneralLp, ObjectiveSense, Row};
use crate::sparse::SparseMatrix;

/// One presolve reduction, in the order applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PresolveAction {
    RemovedEmptyRow { row: String },
    FixedColumn { column: String, value: f64 },
    RemovedEmptyColumn { column: String, value: f64 },
    MergedDuplicateRow { kept: String, removed: String, scale: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Presolved {
    pub lp: GeneralLp,
    pub actions: Vec<PresolveAction>,
}

impl Presolved {
    /// Values of the columns removed by presolve, keyed by column name.
    pub fn removed_column_values(&self) -> HashMap<&str, f64> {
        self.actions
            .iter()
            .filter_map(|a| match a {
                PresolveAction::FixedColumn { column, value }
                | PresolveAction::RemovedEmptyColumn { column, value } => {
                    Some((column.as_str(), *value))
                }
                _ => None,
            })
            .collect()
    }
}

fn feas_tol(v: f64) -> f64 {
    1e-9 * v.abs().max(1.0)
}

struct Work {
    rows: Vec<(f64, f64)>,
    row_entries: Vec<Vec<(usize, f64)>>,
    col_rows: Vec<Vec<usize>>,
    row_active: Vec<bool>,
    col_active: Vec<bool>,
    offset: f64,
}

impl Work {
    fn live_entries(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.row_entries[i].iter().copied().filter(|&(j, _)| self.col_active[j])
    }

    fn col_is_empty(&self, j: usize) -> bool {
        !self.col_rows[j].iter().any(|&i| self.row_active[i])
    }
}

/// Applies the in-house reductions until none applies.
pub fn presolve(lp: &GeneralLp) -> Result<Presolved, Verdict> {
    let m = lp.n_rows();
    let n = lp.n_cols();
    for col in &lp.columns {
        if col.lower > col.upper || col.lower == f64::INFINITY || col.upper == f64::NEG_INFINITY {
            return Err(Verdict::Infeasible(format!(
                "column {} has empty bound interval [{}, {}]",
                col.name, col.lower, col.upper
            )));
        }
    }
    let mut w = Work {
        rows: lp.rows.iter().map(Row::interval).collect(),
        row_entries: (0..m).map(|i| lp.coefficients.row(i).iter().collect()).collect(),
        col_rows: (0..n).map(|j| lp.coefficients.col(j).indices.to_vec()).collect(),
        row_active: vec![true; m],
        col_active: vec![true; n],
        offset: lp.objective_offset,
    };
    for (i, &(lo, hi)) in w.rows.iter().enumerate() {
        if lo > hi {
            return Err(Verdict::Infeasible(format!(
                "row {} has empty interval [{lo}, {hi}]",
                lp.rows[i].name
            )));
        }
    }
    let min_sign = match lp.sense {
        ObjectiveSense::Minimize => 1.0,
        ObjectiveSense::Maximize => -1.0,
    };
    let mut actions = Vec::new();

    loop {
        let mut changed = false;

        for j in 0..n {
            let col = &lp.columns[j];
            if !w.col_active[j] || col.lower != col.upper {
                continue;
            }
            let v = col.lower;
            for &i in &w.col_rows[j] {
                if !w.row_active[i] {
                    continue;
                }
                let a = w.row_entries[i].iter().find(|e| e.0 == j).unwrap().1;
                w.rows[i].0 -= a * v;
                w.rows[i].1 -= a * v;
            }
            w.offset += lp.objective[j] * v;
            w.col_active[j] = false;
            actions.push(PresolveAction::FixedColumn { column: col.name.clone(), value: v });
            changed = true;
        }

        for i in 0..m {
            if !w.row_active[i] || w.live_entries(i).next().is_some() {
                continue;
            }
            let (lo, hi) = w.rows[i];
            if lo > feas_tol(lo) || hi < -feas_tol(hi) {
                return Err(Verdict::Infeasible(format!(
                    "empty row {} requires activity in [{lo}, {hi}]",
                    lp.rows[i].name
                )));
            }
            w.row_active[i] = false;
            actions.push(PresolveAction::RemovedEmptyRow { row: lp.rows[i].name.clone() });
            changed = true;
        }

        for j in 0..n {
            if !w.col_active[j] || !w.col_is_empty(j) {
                continue;
            }
            let col = &lp.columns[j];
            let c = min_sign * lp.objective[j];
            let value = if c > 0.0 {
                col.lower
            } else if c < 0.0 {
                col.upper
            } else if col.lower > 0.0 {
                col.lower
            } else if col.upper < 0.0 {
                col.upper
            } else {
                0.0
            };
            if value.is_infinite() {
                return Err(Verdict::Unbounded(format!(
                    "empty column {} improves the objective without bound",
                    col.name
                )));
            }
            w.offset += lp.objective[j] * value;
            w.col_active[j] = false;
            actions.push(PresolveAction::RemovedEmptyColumn { column: col.name.clone(), value });
            changed = true;
        }

        // Rows equal up to a nonzero scalar: normalize by the leading coefficient.
        let mut seen: HashMap<(Vec<usize>, Vec<u64>), usize> = HashMap::new();
        for i in 0..m {
            if !w.row_active[i] {
                continue;
            }
            let entries: Vec<(usize, f64)> = w.live_entries(i).collect();
            let lead = entries[0].1;
            let key = (
                entries.iter().map(|e| e.0).collect::<Vec<_>>(),
                entries.iter().map(|e| (e.1 / lead).to_bits()).collect::<Vec<_>>(),
            );
            match seen.get(&key) {
                None => {
                    seen.insert(key, i);
                }
                Some(&k) => {
                    let k_lead = w.live_entries(k).next().unwrap().1;
                    // row_i = scale · row_k
                    let scale = lead / k_lead;
                    let (lo, hi) = w.rows[i];
                    let (mut lo, mut hi) = (lo / scale, hi / scale);
                    if scale < 0.0 {
                        std::mem::swap(&mut lo, &mut hi);
                    }
                    let (klo, khi) = w.rows[k];
                    let new_lo = klo.max(lo);
                    let mut new_hi = khi.min(hi);
                    if new_lo > new_hi {
                        if new_lo - new_hi > feas_tol(new_lo.abs().max(new_hi.abs())) {
                            return Err(Verdict::Infeasible(format!(
                                "rows {} and {} are parallel with disjoint intervals",
                                lp.rows[k].name, lp.rows[i].name
                            )));
                        }
                        new_hi = new_lo;
                    }
                    w.rows[k] = (new_lo, new_hi);
                    w.row_active[i] = false;
                    actions.push(PresolveAction::MergedDuplicateRow {
                        kept: lp.rows[k].name.clone(),
                        removed: lp.rows[i].name.clone(),
                        scale,
                    });
                    changed = true;
                }
            }
        }

        if !changed {
            break;
        }
    }

    let col_map: Vec<Option<usize>> = {
        let mut next = 0;
        w.col_active
            .iter()
            .map(|&a| {
                a.then(|| {
                    next += 1;
                    next - 1
                })
            })
            .collect()
    };
    let mut rows = Vec::new();
    let mut triplets = Vec::new();
    for i in 0..m {
        if !w.row_active[i] {
            continue;
        }
        let r = rows.len();
        let original = &lp.rows[i];
        if original.interval() == w.rows[i] {
            rows.push(original.clone());
        } else {
            rows.push(Row::from_interval(original.name.clone(), w.rows[i].0, w.rows[i].1));
        }
        for (j, v) in w.live_entries(i) {
            triplets.push((r, col_map[j].unwrap(), v));
        }
    }
    let columns: Vec<Column> = (0..n)
        .filter(|&j| w.col_active[j])
        .map(|j| lp.columns[j].clone())
        .collect();
    let objective = (0..n).filter(|&j| w.col_active[j]).map(|j| lp.objective[j]).collect();
    let coefficients = SparseMatrix::from_triplets(rows.len(), columns.len(), triplets)
        .expect("presolved indices are in range");

    Ok(Presolved {
        lp: GeneralLp {
            name: lp.name.clone(),
            sense: lp.sense,
            objective_name: lp.objective_name.clone(),
            objective_offset: w.offset,
            rows,
            columns,
            coefficients,
            objective,
            warnings: lp.warnings.clone(),
        },
        actions,
    })
}
