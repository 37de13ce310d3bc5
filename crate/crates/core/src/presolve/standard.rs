//! Conversion of a general LP to `min cᵀx s.t. Ax = b, x ≥ 0`.
//!
//! Column layout: structural columns in original order (a free variable
//! contributes the adjacent pair x⁺, x⁻), then one slack or surplus per
//! inequality row in row order, then bound slacks, then range slacks.
//! Row layout: constraint rows, then upper-bound rows of two-sided
//! columns, then the closing rows of ranged constraints.

use crate::error::Verdict;
use crate::lp::{ColumnProvenance, GeneralLp, ObjectiveSense, StandardLp};
use crate::sparse::SparseMatrix;

#[derive(Clone, Copy)]
enum VarMap {
    /// x = l + x'
    Shift(f64),
    /// x = u − x'
    Reflect(f64),
    /// x = x⁺ − x⁻
    Split,
}

pub fn to_standard_form(lp: &GeneralLp) -> Result<StandardLp, Verdict> {
    let sign = match lp.sense {
        ObjectiveSense::Minimize => 1.0,
        ObjectiveSense::Maximize => -1.0,
    };
    let mut maps = Vec::with_capacity(lp.n_cols());
    let mut first_col = Vec::with_capacity(lp.n_cols());
    let mut provenance = Vec::new();
    let mut c = Vec::new();
    let mut offset = lp.objective_offset;

    for (j, col) in lp.columns.iter().enumerate() {
        if col.lower > col.upper || col.lower == f64::INFINITY || col.upper == f64::NEG_INFINITY {
            return Err(Verdict::Infeasible(format!("column {} has empty bounds", col.name)));
        }
        first_col.push(provenance.len());
        let cj = lp.objective[j];
        let map = if col.lower.is_finite() {
            VarMap::Shift(col.lower)
        } else if col.upper.is_finite() {
            VarMap::Reflect(col.upper)
        } else {
            VarMap::Split
        };
        match map {
            VarMap::Shift(l) => {
                provenance.push(ColumnProvenance::Original(j));
                c.push(sign * cj);
                offset += cj * l;
            }
            VarMap::Reflect(u) => {
                provenance.push(ColumnProvenance::Original(j));
                c.push(-sign * cj);
                offset += cj * u;
            }
            VarMap::Split => {
                provenance.push(ColumnProvenance::FreePos(j));
                provenance.push(ColumnProvenance::FreeNeg(j));
                c.push(sign * cj);
                c.push(-sign * cj);
            }
        }
        maps.push(map);
    }

    let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
    let mut b = Vec::new();
    let mut ranged = Vec::new();

    for (i, row) in lp.rows.iter().enumerate() {
        let (lo, hi) = row.interval();
        if lo == f64::NEG_INFINITY && hi == f64::INFINITY {
            continue;
        }
        let r = b.len();
        let mut shift = 0.0;
        for (j, a) in lp.coefficients.row(i).iter() {
            let k = first_col[j];
            match maps[j] {
                VarMap::Shift(l) => {
                    triplets.push((r, k, a));
                    shift += a * l;
                }
                VarMap::Reflect(u) => {
                    triplets.push((r, k, -a));
                    shift += a * u;
                }
                VarMap::Split => {
                    triplets.push((r, k, a));
                    triplets.push((r, k + 1, -a));
                }
            }
        }
        if lo == hi {
            b.push(lo - shift);
        } else if lo == f64::NEG_INFINITY {
            triplets.push((r, provenance.len(), 1.0));
            provenance.push(ColumnProvenance::Slack(i));
            c.push(0.0);
            b.push(hi - shift);
        } else {
            triplets.push((r, provenance.len(), -1.0));
            provenance.push(ColumnProvenance::Surplus(i));
            c.push(0.0);
            b.push(lo - shift);
            if hi.is_finite() {
                ranged.push((i, provenance.len() - 1, hi - lo));
            }
        }
    }

    for (j, col) in lp.columns.iter().enumerate() {
        if let VarMap::Shift(l) = maps[j] {
            if col.upper.is_finite() {
                let r = b.len();
                triplets.push((r, first_col[j], 1.0));
                triplets.push((r, provenance.len(), 1.0));
                provenance.push(ColumnProvenance::BoundSlack(j));
                c.push(0.0);
                b.push(col.upper - l);
            }
        }
    }
    for (i, surplus_col, width) in ranged {
        let r = b.len();
        triplets.push((r, surplus_col, 1.0));
        triplets.push((r, provenance.len(), 1.0));
        provenance.push(ColumnProvenance::RangeSlack(i));
        c.push(0.0);
        b.push(width);
    }

    let a = SparseMatrix::from_triplets(b.len(), provenance.len(), triplets)
        .expect("standard form indices are in range");
    Ok(StandardLp { a, b, c, provenance, objective_sign: sign, objective_offset: offset })
}
