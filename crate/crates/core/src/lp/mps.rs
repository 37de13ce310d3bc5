//! MPS reader and writer.
//!
//! Both fixed-column and whitespace-delimited files are accepted. The dialect
//! is decided from the ROWS section: a record with more than two fields can
//! only be a fixed-column record whose names contain spaces, and from then on
//! every record is cut at the fixed field positions.
//!
//! Conventions that differ between MPS dialects are applied the common way
//! and recorded in [`GeneralLp::warnings`].

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use log::warn;
use thiserror::Error;

use super::{Column, GeneralLp, ObjectiveSense, Row, RowSense};
use crate::sparse::SparseMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct MpsError {
    pub line: usize,
    pub kind: MpsErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MpsErrorKind {
    #[error("section {found} may not follow {after}")]
    SectionOrder { found: String, after: String },
    #[error("unsupported section {0}")]
    UnsupportedSection(String),
    #[error("missing ENDATA, section {0} is unterminated")]
    MissingEndata(String),
    #[error("data record outside any section")]
    DataOutsideSection,
    #[error("duplicate row {0}")]
    DuplicateRow(String),
    #[error("duplicate column {0}")]
    DuplicateColumn(String),
    #[error("undeclared row {0}")]
    UnknownRow(String),
    #[error("undeclared column {0}")]
    UnknownColumn(String),
    #[error("invalid number {0:?}")]
    InvalidNumber(String),
    #[error("unknown row type {0:?}")]
    UnknownRowType(String),
    #[error("unknown bound type {0:?}")]
    UnknownBoundType(String),
    #[error("malformed {section} record: {detail}")]
    Malformed { section: &'static str, detail: String },
    #[error("no objective (N) row declared")]
    NoObjective,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Section {
    Start,
    Name,
    ObjSense,
    Rows,
    Columns,
    Rhs,
    Ranges,
    Bounds,
    Endata,
}

impl Section {
    fn label(self) -> &'static str {
        match self {
            Section::Start => "(start)",
            Section::Name => "NAME",
            Section::ObjSense => "OBJSENSE",
            Section::Rows => "ROWS",
            Section::Columns => "COLUMNS",
            Section::Rhs => "RHS",
            Section::Ranges => "RANGES",
            Section::Bounds => "BOUNDS",
            Section::Endata => "ENDATA",
        }
    }

    fn from_keyword(word: &str) -> Option<Section> {
        Some(match word {
            "NAME" => Section::Name,
            "OBJSENSE" => Section::ObjSense,
            "ROWS" => Section::Rows,
            "COLUMNS" => Section::Columns,
            "RHS" => Section::Rhs,
            "RANGES" => Section::Ranges,
            "BOUNDS" => Section::Bounds,
            "ENDATA" => Section::Endata,
            _ => return None,
        })
    }
}

const UNSUPPORTED_SECTIONS: &[&str] = &[
    "OBJSENSE_",
    "OBJNAME",
    "QUADOBJ",
    "QMATRIX",
    "QSECTION",
    "QCMATRIX",
    "CSECTION",
    "SOS",
    "INDICATORS",
    "PWLOBJ",
    "GENCONS",
    "LAZYCONS",
    "USERCUTS",
];

/// Absolute bound values at or beyond this are read as infinite.
const MPS_INFINITY: f64 = 1e30;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum RowSlot {
    Objective,
    Ignored,
    Constraint(usize),
}

struct Parser {
    fixed: bool,
    lp_name: String,
    sense: ObjectiveSense,
    objective_name: Option<String>,
    objective_offset: f64,
    rows: Vec<Row>,
    row_lookup: HashMap<String, RowSlot>,
    columns: Vec<Column>,
    col_lookup: HashMap<String, usize>,
    current_column: Option<usize>,
    triplets: Vec<(usize, usize, f64)>,
    objective: Vec<f64>,
    rhs_set: Option<String>,
    range_set: Option<String>,
    bound_set: Option<String>,
    warnings: Vec<String>,
    warned: HashSet<&'static str>,
}

fn err(line: usize, kind: MpsErrorKind) -> MpsError {
    MpsError { line, kind }
}

fn parse_number(token: &str, line: usize) -> Result<f64, MpsError> {
    token
        .parse::<f64>()
        .or_else(|_| token.replace(['D', 'd'], "e").parse::<f64>())
        .map_err(|_| err(line, MpsErrorKind::InvalidNumber(token.to_string())))
}

/// Cuts a fixed-format record at the standard field positions.
fn fixed_fields(line: &str) -> Vec<String> {
    const SPANS: [(usize, usize); 6] = [(1, 3), (4, 12), (14, 22), (24, 36), (39, 47), (49, 61)];
    let chars: Vec<char> = line.chars().collect();
    let mut out: Vec<String> = SPANS
        .iter()
        .map(|&(a, b)| {
            if a >= chars.len() {
                String::new()
            } else {
                chars[a..b.min(chars.len())].iter().collect::<String>().trim().to_string()
            }
        })
        .collect();
    while out.last().is_some_and(|s| s.is_empty()) {
        out.pop();
    }
    out
}

impl Parser {
    fn new() -> Parser {
        Parser {
            fixed: false,
            lp_name: String::new(),
            sense: ObjectiveSense::Minimize,
            objective_name: None,
            objective_offset: 0.0,
            rows: Vec::new(),
            row_lookup: HashMap::new(),
            columns: Vec::new(),
            col_lookup: HashMap::new(),
            current_column: None,
            triplets: Vec::new(),
            objective: Vec::new(),
            rhs_set: None,
            range_set: None,
            bound_set: None,
            warnings: Vec::new(),
            warned: HashSet::new(),
        }
    }

    fn warn(&mut self, msg: String) {
        warn!("{msg}");
        self.warnings.push(msg);
    }

    fn warn_once(&mut self, key: &'static str, msg: String) {
        if self.warned.insert(key) {
            self.warn(msg);
        }
    }

    fn row_slot(&self, name: &str, line: usize) -> Result<RowSlot, MpsError> {
        self.row_lookup
            .get(name)
            .copied()
            .ok_or_else(|| err(line, MpsErrorKind::UnknownRow(name.to_string())))
    }

    fn column_index(&self, name: &str, line: usize) -> Result<usize, MpsError> {
        self.col_lookup
            .get(name)
            .copied()
            .ok_or_else(|| err(line, MpsErrorKind::UnknownColumn(name.to_string())))
    }

    fn fields(&self, line: &str) -> Vec<String> {
        if self.fixed {
            fixed_fields(line)
        } else {
            line.split_whitespace().map(str::to_string).collect()
        }
    }

    fn rows_record(&mut self, line: &str, lineno: usize) -> Result<(), MpsError> {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() > 2 && !self.fixed {
            self.fixed = true;
            self.warn_once("fixed", "fixed-column MPS detected (names contain spaces)".into());
        }
        let f = self.fields(line);
        let (kind, name) = match f.as_slice() {
            [k, n] if !n.is_empty() => (k.as_str(), n.clone()),
            _ => {
                return Err(err(
                    lineno,
                    MpsErrorKind::Malformed { section: "ROWS", detail: line.trim().to_string() },
                ))
            }
        };
        if self.row_lookup.contains_key(&name) {
            return Err(err(lineno, MpsErrorKind::DuplicateRow(name)));
        }
        let sense = match kind.to_ascii_uppercase().as_str() {
            "N" => {
                if self.objective_name.is_none() {
                    self.objective_name = Some(name.clone());
                    self.row_lookup.insert(name, RowSlot::Objective);
                } else {
                    self.warn(format!("additional objective row {name} dropped"));
                    self.row_lookup.insert(name, RowSlot::Ignored);
                }
                return Ok(());
            }
            "L" => RowSense::Le,
            "G" => RowSense::Ge,
            "E" => RowSense::Eq,
            other => return Err(err(lineno, MpsErrorKind::UnknownRowType(other.to_string()))),
        };
        self.row_lookup.insert(name.clone(), RowSlot::Constraint(self.rows.len()));
        self.rows.push(Row { name, sense, rhs: 0.0, range: None });
        Ok(())
    }

    fn columns_record(&mut self, line: &str, lineno: usize) -> Result<(), MpsError> {
        let mut f = self.fields(line);
        if self.fixed && !f.is_empty() {
            f.remove(0);
        }
        if f.iter().any(|t| t == "'MARKER'") {
            self.warn_once("marker", "integrality markers ignored (LP relaxation)".into());
            return Ok(());
        }
        let malformed = || {
            err(
                lineno,
                MpsErrorKind::Malformed { section: "COLUMNS", detail: line.trim().to_string() },
            )
        };
        if !(f.len() == 3 || f.len() == 5) || f[0].is_empty() {
            return Err(malformed());
        }
        let name = f[0].clone();
        let col = match self.current_column {
            Some(j) if self.columns[j].name == name => j,
            _ => {
                if self.col_lookup.contains_key(&name) {
                    return Err(err(lineno, MpsErrorKind::DuplicateColumn(name)));
                }
                let j = self.columns.len();
                self.col_lookup.insert(name.clone(), j);
                self.columns.push(Column::new(name));
                self.objective.push(0.0);
                self.current_column = Some(j);
                j
            }
        };
        for pair in f[1..].chunks(2) {
            if pair[0].is_empty() {
                return Err(malformed());
            }
            let value = parse_number(&pair[1], lineno)?;
            match self.row_slot(&pair[0], lineno)? {
                RowSlot::Objective => self.objective[col] += value,
                RowSlot::Ignored => {}
                RowSlot::Constraint(i) => self.triplets.push((i, col, value)),
            }
        }
        Ok(())
    }

    /// Splits an RHS/RANGES record into its set name and (row, value) pairs.
    fn set_record(
        &self,
        line: &str,
        lineno: usize,
        section: &'static str,
    ) -> Result<(String, Vec<(String, f64)>), MpsError> {
        let f = self.fields(line);
        let malformed =
            || err(lineno, MpsErrorKind::Malformed { section, detail: line.trim().to_string() });
        let (set, rest) = if self.fixed {
            if f.len() < 4 {
                return Err(malformed());
            }
            (f[1].clone(), &f[2..])
        } else {
            match f.len() {
                2 | 4 => (String::new(), &f[..]),
                3 | 5 => (f[0].clone(), &f[1..]),
                _ => return Err(malformed()),
            }
        };
        if rest.len() % 2 != 0 {
            return Err(malformed());
        }
        let mut pairs = Vec::new();
        for p in rest.chunks(2) {
            if p[0].is_empty() {
                return Err(malformed());
            }
            pairs.push((p[0].clone(), parse_number(&p[1], lineno)?));
        }
        Ok((set, pairs))
    }

    fn accept_set(current: &mut Option<String>, set: &str) -> bool {
        match current {
            None => {
                *current = Some(set.to_string());
                true
            }
            Some(s) => s == set,
        }
    }

    fn rhs_record(&mut self, line: &str, lineno: usize) -> Result<(), MpsError> {
        let (set, pairs) = self.set_record(line, lineno, "RHS")?;
        if !Self::accept_set(&mut self.rhs_set, &set) {
            self.warn_once("rhs_set", format!("additional RHS set {set} ignored"));
            return Ok(());
        }
        for (row, value) in pairs {
            match self.row_slot(&row, lineno)? {
                RowSlot::Objective => {
                    self.objective_offset = -value;
                    self.warn_once(
                        "obj_rhs",
                        format!("RHS on objective row read as objective constant {}", -value),
                    );
                }
                RowSlot::Ignored => {}
                RowSlot::Constraint(i) => self.rows[i].rhs = value,
            }
        }
        Ok(())
    }

    fn ranges_record(&mut self, line: &str, lineno: usize) -> Result<(), MpsError> {
        let (set, pairs) = self.set_record(line, lineno, "RANGES")?;
        if !Self::accept_set(&mut self.range_set, &set) {
            self.warn_once("range_set", format!("additional RANGES set {set} ignored"));
            return Ok(());
        }
        for (row, value) in pairs {
            match self.row_slot(&row, lineno)? {
                RowSlot::Objective | RowSlot::Ignored => {
                    self.warn(format!("range on objective row {row} ignored"));
                }
                RowSlot::Constraint(i) => {
                    if self.rows[i].sense == RowSense::Eq && value < 0.0 {
                        self.warn_once(
                            "neg_e_range",
                            "negative range on E row read as [rhs + R, rhs]".into(),
                        );
                    }
                    self.rows[i].range = Some(value);
                }
            }
        }
        Ok(())
    }

    fn bounds_record(&mut self, line: &str, lineno: usize) -> Result<(), MpsError> {
        let f = self.fields(line);
        let malformed = || {
            err(lineno, MpsErrorKind::Malformed { section: "BOUNDS", detail: line.trim().to_string() })
        };
        if f.len() < 2 {
            return Err(malformed());
        }
        let kind = f[0].to_ascii_uppercase();
        let needs_value = matches!(kind.as_str(), "UP" | "LO" | "FX" | "LI" | "UI");
        let no_value = matches!(kind.as_str(), "FR" | "MI" | "PL");
        if !(needs_value || no_value || kind == "BV") {
            return Err(err(lineno, MpsErrorKind::UnknownBoundType(f[0].clone())));
        }
        let (set, col_name, value) = if self.fixed {
            let set = f.get(1).cloned().unwrap_or_default();
            let col = f.get(2).cloned().ok_or_else(malformed)?;
            (set, col, f.get(3).cloned())
        } else {
            match (f.len(), needs_value) {
                (4, true) => (f[1].clone(), f[2].clone(), Some(f[3].clone())),
                (3, true) => (String::new(), f[1].clone(), Some(f[2].clone())),
                (3, false) if no_value => (f[1].clone(), f[2].clone(), None),
                (2, false) => (String::new(), f[1].clone(), None),
                (3, false) => {
                    // BV with either a set name or a trailing value.
                    if self.col_lookup.contains_key(&f[1]) && f[2].parse::<f64>().is_ok() {
                        (String::new(), f[1].clone(), Some(f[2].clone()))
                    } else {
                        (f[1].clone(), f[2].clone(), None)
                    }
                }
                (4, false) if kind == "BV" => (f[1].clone(), f[2].clone(), Some(f[3].clone())),
                _ => return Err(malformed()),
            }
        };
        if !Self::accept_set(&mut self.bound_set, &set) {
            self.warn_once("bound_set", format!("additional BOUNDS set {set} ignored"));
            return Ok(());
        }
        let j = self.column_index(&col_name, lineno)?;
        let value = match value {
            Some(v) if !v.is_empty() => Some(parse_number(&v, lineno)?),
            _ if needs_value => return Err(malformed()),
            _ => None,
        };
        let value = value.map(|v| {
            if v >= MPS_INFINITY {
                f64::INFINITY
            } else if v <= -MPS_INFINITY {
                f64::NEG_INFINITY
            } else {
                v
            }
        });
        let col = &mut self.columns[j];
        let mut notes: Vec<(&'static str, String)> = Vec::new();
        match kind.as_str() {
            "UP" | "UI" => {
                let v = value.unwrap();
                if v < 0.0 && col.lower == 0.0 {
                    col.lower = f64::NEG_INFINITY;
                    notes.push((
                        "neg_up",
                        format!("negative UP bound on {col_name} with zero lower bound: lower set to -inf"),
                    ));
                }
                col.upper = v;
            }
            "LO" | "LI" => col.lower = value.unwrap(),
            "FX" => {
                col.lower = value.unwrap();
                col.upper = value.unwrap();
            }
            "FR" => {
                col.lower = f64::NEG_INFINITY;
                col.upper = f64::INFINITY;
            }
            "MI" => col.lower = f64::NEG_INFINITY,
            "PL" => col.upper = f64::INFINITY,
            "BV" => {
                col.lower = 0.0;
                col.upper = 1.0;
                notes.push(("bv", "BV bounds read as [0, 1], integrality ignored".into()));
            }
            _ => unreachable!(),
        }
        if matches!(kind.as_str(), "LI" | "UI") {
            notes.push(("int_bound", "LI/UI bounds read as LO/UP, integrality ignored".into()));
        }
        for (key, msg) in notes {
            if key == "neg_up" {
                self.warn(msg);
            } else {
                self.warn_once(key, msg);
            }
        }
        Ok(())
    }

    fn objsense_record(&mut self, word: &str, lineno: usize) -> Result<(), MpsError> {
        self.sense = match word.to_ascii_uppercase().as_str() {
            "MAX" | "MAXIMIZE" => ObjectiveSense::Maximize,
            "MIN" | "MINIMIZE" => ObjectiveSense::Minimize,
            other => {
                return Err(err(
                    lineno,
                    MpsErrorKind::Malformed { section: "OBJSENSE", detail: other.to_string() },
                ))
            }
        };
        Ok(())
    }

    fn finish(self, lineno: usize) -> Result<GeneralLp, MpsError> {
        let objective_name =
            self.objective_name.ok_or_else(|| err(lineno, MpsErrorKind::NoObjective))?;
        let coefficients =
            SparseMatrix::from_triplets(self.rows.len(), self.columns.len(), self.triplets)
                .map_err(|e| {
                    err(lineno, MpsErrorKind::Malformed { section: "COLUMNS", detail: e.to_string() })
                })?;
        Ok(GeneralLp {
            name: self.lp_name,
            sense: self.sense,
            objective_name,
            objective_offset: self.objective_offset,
            rows: self.rows,
            columns: self.columns,
            coefficients,
            objective: self.objective,
            warnings: self.warnings,
        })
    }
}

/// Parses MPS text into a [`GeneralLp`].
pub fn parse_mps(text: &str) -> Result<GeneralLp, MpsError> {
    let mut p = Parser::new();
    let mut section = Section::Start;
    let mut lineno = 0;
    for raw in text.lines() {
        lineno += 1;
        let line = raw.trim_end_matches(['\r', '\n']);
        if line.trim().is_empty() || line.starts_with('*') {
            continue;
        }
        let starts_at_col1 = !line.starts_with([' ', '\t']);
        let first = line.split_whitespace().next().unwrap_or("");
        if starts_at_col1 {
            let upper = first.to_ascii_uppercase();
            if let Some(next) = Section::from_keyword(&upper) {
                if next <= section {
                    return Err(err(
                        lineno,
                        MpsErrorKind::SectionOrder {
                            found: next.label().into(),
                            after: section.label().into(),
                        },
                    ));
                }
                section = next;
                let rest = line[first.len()..].trim();
                match section {
                    Section::Name => p.lp_name = rest.to_string(),
                    Section::ObjSense if !rest.is_empty() => p.objsense_record(rest, lineno)?,
                    Section::Endata => break,
                    _ => {}
                }
                continue;
            }
            if UNSUPPORTED_SECTIONS.contains(&upper.as_str()) {
                return Err(err(lineno, MpsErrorKind::UnsupportedSection(upper)));
            }
        }
        match section {
            Section::Start | Section::Name => {
                return Err(err(lineno, MpsErrorKind::DataOutsideSection))
            }
            Section::ObjSense => p.objsense_record(first, lineno)?,
            Section::Rows => p.rows_record(line, lineno)?,
            Section::Columns => p.columns_record(line, lineno)?,
            Section::Rhs => p.rhs_record(line, lineno)?,
            Section::Ranges => p.ranges_record(line, lineno)?,
            Section::Bounds => p.bounds_record(line, lineno)?,
            Section::Endata => unreachable!(),
        }
    }
    if section != Section::Endata {
        return Err(err(lineno, MpsErrorKind::MissingEndata(section.label().into())));
    }
    p.finish(lineno)
}

/// Shortest text that parses back to exactly `v`.
fn fmt_num(v: f64) -> String {
    let plain = format!("{v}");
    let exp = format!("{v:e}");
    if plain.len() <= exp.len() {
        plain
    } else {
        exp
    }
}

fn mps_name(name: &str) -> String {
    if name.is_empty() {
        "_".to_string()
    } else {
        name.split_whitespace().collect::<Vec<_>>().join("_")
    }
}

/// Writes `lp` as free-format MPS. Whitespace inside names becomes `_`.
pub fn emit_mps(lp: &GeneralLp) -> String {
    let mut out = String::new();
    let obj = if lp.objective_name.is_empty() {
        "OBJ".to_string()
    } else {
        mps_name(&lp.objective_name)
    };
    if lp.name.is_empty() {
        out.push_str("NAME\n");
    } else {
        let _ = writeln!(out, "NAME          {}", lp.name);
    }
    if lp.sense == ObjectiveSense::Maximize {
        out.push_str("OBJSENSE\n    MAX\n");
    }
    out.push_str("ROWS\n");
    let _ = writeln!(out, " N  {obj}");
    for row in &lp.rows {
        let code = match row.sense {
            RowSense::Le => 'L',
            RowSense::Ge => 'G',
            RowSense::Eq => 'E',
        };
        let _ = writeln!(out, " {code}  {}", mps_name(&row.name));
    }
    out.push_str("COLUMNS\n");
    for (j, col) in lp.columns.iter().enumerate() {
        let name = mps_name(&col.name);
        let entries = lp.coefficients.col(j);
        if lp.objective[j] != 0.0 || entries.nnz() == 0 {
            let _ = writeln!(out, "    {name}  {obj}  {}", fmt_num(lp.objective[j]));
        }
        for (i, v) in entries.iter() {
            let _ = writeln!(out, "    {name}  {}  {}", mps_name(&lp.rows[i].name), fmt_num(v));
        }
    }
    out.push_str("RHS\n");
    for row in &lp.rows {
        if row.rhs != 0.0 {
            let _ = writeln!(out, "    RHS  {}  {}", mps_name(&row.name), fmt_num(row.rhs));
        }
    }
    if lp.objective_offset != 0.0 {
        let _ = writeln!(out, "    RHS  {obj}  {}", fmt_num(-lp.objective_offset));
    }
    if lp.rows.iter().any(|r| r.range.is_some()) {
        out.push_str("RANGES\n");
        for row in &lp.rows {
            if let Some(r) = row.range {
                let _ = writeln!(out, "    RNG  {}  {}", mps_name(&row.name), fmt_num(r));
            }
        }
    }
    let mut bounds = String::new();
    for col in &lp.columns {
        let name = mps_name(&col.name);
        let (l, u) = (col.lower, col.upper);
        if l == u {
            let _ = writeln!(bounds, " FX BND  {name}  {}", fmt_num(l));
            continue;
        }
        if l == f64::NEG_INFINITY && u == f64::INFINITY {
            let _ = writeln!(bounds, " FR BND  {name}");
            continue;
        }
        if l == f64::NEG_INFINITY {
            let _ = writeln!(bounds, " MI BND  {name}");
        } else if l != 0.0 {
            let _ = writeln!(bounds, " LO BND  {name}  {}", fmt_num(l));
        }
        if u != f64::INFINITY {
            let _ = writeln!(bounds, " UP BND  {name}  {}", fmt_num(u));
            if u < 0.0 && l == 0.0 {
                // Re-assert the zero lower bound that a negative UP would clear.
                let _ = writeln!(bounds, " LO BND  {name}  0");
            }
        }
    }
    if !bounds.is_empty() {
        out.push_str("BOUNDS\n");
        out.push_str(&bounds);
    }
    out.push_str("ENDATA\n");
    out
}
