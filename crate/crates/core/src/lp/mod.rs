//! Linear program data model.
//!
//! [`GeneralLp`] mirrors an MPS file: ranged rows, arbitrary variable bounds
//! and a minimize/maximize sense. [`StandardLp`] is the reduced form
//! `min cᵀx s.t. Ax = b, x ≥ 0`.

pub mod mps;

use serde::{Deserialize, Serialize};

use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ObjectiveSense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RowSense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub name: String,
    pub sense: RowSense,
    pub rhs: f64,
    pub range: Option<f64>,
}

impl Row {
    /// Builds a row whose feasible interval is `[lo, hi]`.
    pub fn from_interval(name: impl Into<String>, lo: f64, hi: f64) -> Row {
        let name = name.into();
        if lo == hi {
            Row { name, sense: RowSense::Eq, rhs: lo, range: None }
        } else if lo == f64::NEG_INFINITY {
            Row { name, sense: RowSense::Le, rhs: hi, range: None }
        } else if hi == f64::INFINITY {
            Row { name, sense: RowSense::Ge, rhs: lo, range: None }
        } else {
            Row { name, sense: RowSense::Le, rhs: hi, range: Some(hi - lo) }
        }
    }

    /// Feasible interval `[lo, hi]` of the row activity, applying the MPS
    /// RANGES convention.
    pub fn interval(&self) -> (f64, f64) {
        let rhs = self.rhs;
        match (self.sense, self.range) {
            (RowSense::Le, None) => (f64::NEG_INFINITY, rhs),
            (RowSense::Ge, None) => (rhs, f64::INFINITY),
            (RowSense::Eq, None) => (rhs, rhs),
            (RowSense::Le, Some(r)) => (rhs - r.abs(), rhs),
            (RowSense::Ge, Some(r)) => (rhs, rhs + r.abs()),
            (RowSense::Eq, Some(r)) if r >= 0.0 => (rhs, rhs + r),
            (RowSense::Eq, Some(r)) => (rhs + r, rhs),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub lower: f64,
    pub upper: f64,
}

impl Column {
    pub fn new(name: impl Into<String>) -> Column {
        Column { name: name.into(), lower: 0.0, upper: f64::INFINITY }
    }
}

/// An LP as read from an MPS file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralLp {
    pub name: String,
    pub sense: ObjectiveSense,
    pub objective_name: String,
    /// Constant added to every reported objective value.
    pub objective_offset: f64,
    pub rows: Vec<Row>,
    pub columns: Vec<Column>,
    /// Constraint matrix, rows × columns (objective row excluded).
    pub coefficients: SparseMatrix,
    pub objective: Vec<f64>,
    pub warnings: Vec<String>,
}

impl GeneralLp {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    /// Equality of everything that defines the optimization problem; warnings
    /// are ignored.
    pub fn same_problem(&self, other: &GeneralLp) -> bool {
        self.name == other.name
            && self.sense == other.sense
            && self.objective_name == other.objective_name
            && self.objective_offset == other.objective_offset
            && self.rows == other.rows
            && self.columns == other.columns
            && self.coefficients == other.coefficients
            && self.objective == other.objective
    }

    /// Objective value of `x` in the problem's own sense, including the offset.
    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum::<f64>() + self.objective_offset
    }
}

/// Origin of a standard-form column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ColumnProvenance {
    /// Original variable, possibly shifted (`x = l + x'`) or reflected (`x = u − x'`).
    Original(usize),
    Slack(usize),
    Surplus(usize),
    /// Slack of the upper-bound row of an original column.
    BoundSlack(usize),
    FreePos(usize),
    FreeNeg(usize),
    /// Slack closing the upper side of a ranged row.
    RangeSlack(usize),
}

/// `min cᵀx s.t. Ax = b, x ≥ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardLp {
    pub a: SparseMatrix,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub provenance: Vec<ColumnProvenance>,
    /// Reported objective = `objective_sign · cᵀx + objective_offset`.
    pub objective_sign: f64,
    pub objective_offset: f64,
}

impl StandardLp {
    pub fn m(&self) -> usize {
        self.a.n_rows()
    }

    pub fn n(&self) -> usize {
        self.a.n_cols()
    }

    /// Builds a standard LP with all columns tagged as original variables.
    pub fn new(a: SparseMatrix, b: Vec<f64>, c: Vec<f64>) -> StandardLp {
        assert_eq!(a.n_rows(), b.len());
        assert_eq!(a.n_cols(), c.len());
        let provenance = (0..a.n_cols()).map(ColumnProvenance::Original).collect();
        StandardLp { a, b, c, provenance, objective_sign: 1.0, objective_offset: 0.0 }
    }

    /// The same problem as a minimization with equality rows and
    /// non-negative columns, named `R<i>` and `X<j>`.
    pub fn to_general(&self, name: &str) -> GeneralLp {
        GeneralLp {
            name: name.to_string(),
            sense: ObjectiveSense::Minimize,
            objective_name: "OBJ".to_string(),
            objective_offset: 0.0,
            rows: self
                .b
                .iter()
                .enumerate()
                .map(|(i, &b)| Row { name: format!("R{i}"), sense: RowSense::Eq, rhs: b, range: None })
                .collect(),
            columns: (0..self.n()).map(|j| Column::new(format!("X{j}"))).collect(),
            coefficients: self.a.clone(),
            objective: self.c.clone(),
            warnings: Vec::new(),
        }
    }

    /// Maps a standard-form objective value back to the original problem.
    pub fn reported_objective(&self, standard_value: f64) -> f64 {
        self.objective_sign * standard_value + self.objective_offset
    }
}
