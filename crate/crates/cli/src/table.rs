//! Tab-separated result tables with a commented header.
//!
//! ```text
//! # table: condensate_fraction
//! # config_hash: 3f2a...
//! # units: hbar*omega/k_B	1	1
//! T	n0_fraction	n0_fraction_err
//! 5	0.97	0.0004
//! ```
//!
//! Metadata lines are `# key: value`; the `units` line is mandatory and
//! aligned with the column names. Values use the shortest decimal form that
//! parses back to the same `f64`.

use std::fmt::Write as _;
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug)]
pub struct Column {
    pub name: String,
    pub unit: String,
}

#[derive(Clone, Debug)]
pub struct ResultTable {
    pub name: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<f64>>,
    /// Ordered `(key, value)` provenance and notes.
    pub meta: Vec<(String, String)>,
}

/// Bitwise equality, so `NaN` cells compare equal to themselves.
impl PartialEq for ResultTable {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.meta == other.meta
            && self.columns.len() == other.columns.len()
            && self.columns.iter().zip(&other.columns).all(|(a, b)| a.name == b.name && a.unit == b.unit)
            && self.rows.len() == other.rows.len()
            && self
                .rows
                .iter()
                .zip(&other.rows)
                .all(|(a, b)| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits()))
    }
}

fn clean(s: &str) -> String {
    s.replace(['\n', '\r', '\t'], " ")
}

impl ResultTable {
    pub fn new(name: &str, columns: &[(&str, &str)]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|(n, u)| Column { name: (*n).into(), unit: (*u).into() }).collect(),
            rows: Vec::new(),
            meta: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.columns.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: impl ToString) {
        self.meta.push((clean(key).replace(':', "_"), clean(&value.to_string())));
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.columns.iter().position(|c| c.name == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn emit(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# table: {}", clean(&self.name));
        for (k, v) in &self.meta {
            let _ = writeln!(out, "# {k}: {v}");
        }
        let units: Vec<&str> = self.columns.iter().map(|c| c.unit.as_str()).collect();
        let names: Vec<&str> = self.columns.iter().map(|c| c.name.as_str()).collect();
        let _ = writeln!(out, "# units: {}", units.join("\t"));
        let _ = writeln!(out, "{}", names.join("\t"));
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", cells.join("\t"));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, TableError> {
        let err = |line: usize, reason: &str| TableError::Parse { line, reason: reason.into() };
        let mut name = None;
        let mut meta = Vec::new();
        let mut units: Option<Vec<String>> = None;
        let mut columns: Option<Vec<Column>> = None;
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let n = i + 1;
            if let Some(rest) = line.strip_prefix("# ") {
                let (k, v) = rest.split_once(": ").ok_or_else(|| err(n, "comment is not `key: value`"))?;
                match k {
                    "table" => name = Some(v.to_string()),
                    "units" => units = Some(v.split('\t').map(String::from).collect()),
                    _ => meta.push((k.to_string(), v.to_string())),
                }
            } else if columns.is_none() {
                let u = units.take().ok_or_else(|| err(n, "column names before units line"))?;
                let names: Vec<&str> = line.split('\t').collect();
                if names.len() != u.len() {
                    return Err(err(n, "units and column names differ in length"));
                }
                columns = Some(names.iter().zip(u).map(|(a, b)| Column { name: (*a).into(), unit: b }).collect());
            } else {
                let row = line
                    .split('\t')
                    .map(|c| c.parse::<f64>().map_err(|_| err(n, "cell is not a number")))
                    .collect::<Result<Vec<_>, _>>()?;
                if row.len() != columns.as_ref().map_or(0, |c| c.len()) {
                    return Err(err(n, "row width differs from header"));
                }
                rows.push(row);
            }
        }
        Ok(Self {
            name: name.ok_or_else(|| err(1, "missing table name"))?,
            columns: columns.ok_or_else(|| err(1, "missing column header"))?,
            rows,
            meta,
        })
    }

    pub fn write(&self, dir: &Path) -> Result<std::path::PathBuf, TableError> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(format!("{}.tsv", self.name));
        std::fs::write(&path, self.emit())?;
        Ok(path)
    }

    pub fn read(path: &Path) -> Result<Self, TableError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

/// Data lines of an emitted table, without metadata.
pub fn data_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}
