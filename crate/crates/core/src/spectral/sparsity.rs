//! Sparsity `s` (largest number of nonzeros in any row or column) of the
//! MNES and OSS matrices.
//!
//! The generic rules bound `s` from the dimensions and the pattern of `A`
//! alone, treating `A_B⁻¹ A_N` as dense. The measured rules compute the
//! actual pattern of `A_B⁻¹ A_N` (or of `M̂`) by probing the operators with
//! unit vectors on the cheaper side. An entry counts as nonzero when it
//! exceeds `1e-9` times the largest entry of the probed block.

use serde::{Deserialize, Serialize};

use crate::basis::{BasisSelection, Position};
use crate::error::Result;
use crate::newton::NullSpaceOp;
use crate::operator::LinearOperator;
use crate::sparse::SparseMatrix;

/// Relative magnitude above which a probed entry is structurally nonzero.
pub const PATTERN_REL_TOL: f64 = 1e-9;
/// Entries below this fraction of their probe's largest entry are dropped
/// while probing.
const NOISE_REL_TOL: f64 = 1e-15;

/// Default cap on unit-vector probes per operator.
pub const DEFAULT_PROBE_BUDGET: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SparsityRule {
    /// Pattern measured completely.
    Measured,
    /// Probe budget exhausted; the value is a lower bound on the true sparsity.
    MeasuredPartial,
    /// Dimension-based rule.
    Generic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparsityMeasure {
    pub value: u64,
    pub rule: SparsityRule,
    /// Value of the generic rule for the same system.
    pub generic: u64,
    pub probes: usize,
}

/// Generic MNES rule: `M̂` is `m × m` and treated as dense.
pub fn sparsity_mnes(m: usize) -> u64 {
    m as u64
}

/// Generic OSS rule for `O = [−X Aᵀ  S V]`.
///
/// Maximum of the largest row count of `A` (columns of `−XAᵀ`), `m + 1`
/// (columns of `SV`), `nnz(a_j) + (n − m)` (rows of basic columns with
/// `A_B⁻¹A_N` dense; any column may be basic) and `nnz(a_j) + 1` (rows of
/// nonbasic columns). Without nonbasic columns only the `A` terms remain.
pub fn sparsity_oss(a: &SparseMatrix, m: usize, n: usize) -> u64 {
    let max_row = a.max_row_nnz();
    let max_col = a.max_col_nnz();
    if n <= m {
        return max_row.max(max_col) as u64;
    }
    [max_row, m + 1, max_col + (n - m), max_col + 1].into_iter().max().unwrap() as u64
}

/// Row and column nonzero counts of a probed block.
struct Pattern {
    row_counts: Vec<usize>,
    col_counts: Vec<usize>,
    complete: bool,
    probes: usize,
}

/// Probes `op` with unit vectors, by columns (`op e_j`) or by rows
/// (`opᵀ e_i`). `keep` selects which output components belong to the block
/// and maps them to block indices.
fn probe<F>(
    op: &dyn LinearOperator,
    by_columns: bool,
    probe_indices: &[usize],
    out_len: usize,
    block_rows: usize,
    block_cols: usize,
    keep: F,
    budget: usize,
) -> Pattern
where
    F: Fn(usize) -> Option<usize>,
{
    let in_len = if by_columns { op.ncols() } else { op.nrows() };
    let mut e = vec![0.0; in_len];
    let mut y = vec![0.0; out_len];
    let mut entries: Vec<(usize, usize, f64)> = Vec::new();
    let mut global = 0.0f64;
    let probes = probe_indices.len().min(budget);
    for (probe_no, &idx) in probe_indices.iter().take(probes).enumerate() {
        e[idx] = 1.0;
        if by_columns {
            op.apply(&e, &mut y);
        } else {
            op.apply_transpose(&e, &mut y);
        }
        e[idx] = 0.0;
        let local = y
            .iter()
            .enumerate()
            .filter(|(i, _)| keep(*i).is_some())
            .fold(0.0f64, |a, (_, v)| a.max(v.abs()));
        global = global.max(local);
        for (i, &v) in y.iter().enumerate() {
            let Some(b) = keep(i) else { continue };
            if v != 0.0 && v.abs() > NOISE_REL_TOL * local {
                if by_columns {
                    entries.push((b, probe_no, v.abs()));
                } else {
                    entries.push((probe_no, b, v.abs()));
                }
            }
        }
    }
    let mut row_counts = vec![0; block_rows];
    let mut col_counts = vec![0; block_cols];
    for (r, c, v) in entries {
        if v > PATTERN_REL_TOL * global {
            row_counts[r] += 1;
            col_counts[c] += 1;
        }
    }
    Pattern { row_counts, col_counts, complete: probes == probe_indices.len(), probes }
}

/// Measured sparsity of `M̂` from its columns.
pub fn measured_sparsity_mnes(mnes: &dyn LinearOperator, budget: usize) -> Result<SparsityMeasure> {
    let m = mnes.nrows();
    let indices: Vec<usize> = (0..m).collect();
    let p = probe(mnes, true, &indices, m, m, m, Some, budget);
    let value = p.row_counts.iter().chain(&p.col_counts).copied().max().unwrap_or(0);
    Ok(SparsityMeasure {
        value: value as u64,
        rule: if p.complete { SparsityRule::Measured } else { SparsityRule::MeasuredPartial },
        generic: sparsity_mnes(m),
        probes: p.probes,
    })
}

/// Measured sparsity of `O = [−X Aᵀ  S V]` with the pattern of `A_B⁻¹ A_N`
/// taken from `V`.
pub fn measured_sparsity_oss(a: &SparseMatrix, basis: &BasisSelection, budget: usize) -> Result<SparsityMeasure> {
    let m = a.n_rows();
    let n = a.n_cols();
    let generic = sparsity_oss(a, m, n);
    let a_part = (0..m)
        .map(|i| a.row(i).nnz())
        .chain((0..n).filter(|&j| matches!(basis.position(j), Position::Nonbasic(_))).map(|j| a.col(j).nnz() + 1))
        .max()
        .unwrap_or(0);
    let nb = n - m;
    if nb == 0 {
        let value = a.max_row_nnz().max(a.max_col_nnz());
        return Ok(SparsityMeasure { value: value as u64, rule: SparsityRule::Measured, generic, probes: 0 });
    }
    let v = NullSpaceOp::new(a, basis);
    let keep = |i: usize| match basis.position(i) {
        Position::Basic(p) => Some(p),
        Position::Nonbasic(_) => None,
    };
    // Block G = A_B⁻¹ A_N is m × (n − m): probe along its shorter side.
    let p = if nb <= m {
        let idx: Vec<usize> = (0..nb).collect();
        probe(&v, true, &idx, n, m, nb, keep, budget)
    } else {
        // Row probes follow pivot order, which matches block rows.
        probe(&v, false, &basis.basic, nb, m, nb, Some, budget)
    };
    let basic_rows = basis
        .basic
        .iter()
        .enumerate()
        .map(|(pos, &j)| a.col(j).nnz() + p.row_counts[pos])
        .max()
        .unwrap_or(0);
    let lambda_cols = p.col_counts.iter().map(|c| c + 1).max().unwrap_or(0);
    let value = a_part.max(basic_rows).max(lambda_cols);
    Ok(SparsityMeasure {
        value: value as u64,
        rule: if p.complete { SparsityRule::Measured } else { SparsityRule::MeasuredPartial },
        generic,
        probes: p.probes,
    })
}
