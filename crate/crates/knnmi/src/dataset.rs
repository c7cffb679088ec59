//! Observed samples as an n x p column-major matrix with named variables.
//!
//! Column-major storage keeps every marginal-subspace projection a contiguous
//! slice, which is what the counting queries iterate over.

use std::collections::HashSet;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    names: Vec<String>,
    /// Column-major: column j occupies values[j*n .. (j+1)*n].
    values: Vec<f64>,
    n: usize,
    p: usize,
}

impl Dataset {
    /// Build a dataset from per-variable columns, validating all invariants:
    /// finite entries, n >= 1, p >= 1, unique names, equal column lengths.
    pub fn from_columns(names: Vec<String>, columns: Vec<Vec<f64>>) -> Result<Dataset> {
        if names.is_empty() || columns.is_empty() {
            return Err(Error::EmptyData("a dataset needs at least one column".into()));
        }
        if names.len() != columns.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} names for {} columns",
                names.len(),
                columns.len()
            )));
        }
        let mut seen = HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateName(name.clone()));
            }
        }
        let n = columns[0].len();
        if n == 0 {
            return Err(Error::EmptyData("a dataset needs at least one row".into()));
        }
        for (j, col) in columns.iter().enumerate() {
            if col.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "column '{}' has {} rows, expected {}",
                    names[j],
                    col.len(),
                    n
                )));
            }
            for (i, v) in col.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFiniteValue { row: i, col: names[j].clone() });
                }
            }
        }
        let p = columns.len();
        let mut values = Vec::with_capacity(n * p);
        for col in &columns {
            values.extend_from_slice(col);
        }
        Ok(Dataset { names, values, n, p })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Contiguous view of column j.
    pub fn col(&self, j: usize) -> &[f64] {
        &self.values[j * self.n..(j + 1) * self.n]
    }

    /// Views of the listed columns, in the given order.
    pub fn cols(&self, idx: &[usize]) -> Vec<&[f64]> {
        idx.iter().map(|&j| self.col(j)).collect()
    }

    pub fn col_index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownColumn(name.to_string()))
    }

    /// Read a CSV file: header row with variable names, comma separator,
    /// decimal-point reals.
    pub fn read_csv(path: impl AsRef<Path>) -> Result<Dataset> {
        let path = path.as_ref();
        let file = std::fs::File::open(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_reader(file).map_err(|e| match e {
            Error::Csv { msg, .. } => Error::Csv { path: path.to_path_buf(), msg },
            other => other,
        })
    }

    pub fn from_reader(reader: impl Read) -> Result<Dataset> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .flexible(true)
            .from_reader(reader);
        let headers = rdr
            .headers()
            .map_err(|e| Error::Csv { path: "<input>".into(), msg: e.to_string() })?
            .clone();
        if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
            return Err(Error::EmptyData("empty file".into()));
        }
        let names: Vec<String> = headers.iter().map(|s| s.to_string()).collect();
        let p = names.len();
        let mut columns: Vec<Vec<f64>> = vec![Vec::new(); p];
        for (row_idx, record) in rdr.records().enumerate() {
            let record =
                record.map_err(|e| Error::Csv { path: "<input>".into(), msg: e.to_string() })?;
            if record.len() != p {
                return Err(Error::RaggedRow {
                    row: row_idx,
                    expected: p,
                    found: record.len(),
                });
            }
            for (col_idx, cell) in record.iter().enumerate() {
                let v: f64 = cell.trim().parse().map_err(|_| Error::MalformedCell {
                    row: row_idx,
                    col: col_idx,
                    cell: cell.to_string(),
                })?;
                if !v.is_finite() {
                    return Err(Error::NonFiniteValue {
                        row: row_idx,
                        col: names[col_idx].clone(),
                    });
                }
                columns[col_idx].push(v);
            }
        }
        Dataset::from_columns(names, columns)
    }

    /// Write as CSV. Values use Rust's shortest round-trip formatting, so a
    /// save/load cycle reproduces every f64 bit-exactly.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.to_writer(file, path)
    }

    fn to_writer(&self, mut w: impl Write, path: &Path) -> Result<()> {
        let io_err = |source| Error::Io { path: path.to_path_buf(), source };
        writeln!(w, "{}", self.names.join(",")).map_err(io_err)?;
        let mut line = String::new();
        for i in 0..self.n {
            line.clear();
            for j in 0..self.p {
                if j > 0 {
                    line.push(',');
                }
                line.push_str(&format!("{}", self.col(j)[i]));
            }
            writeln!(w, "{line}").map_err(io_err)?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.to_writer(&mut buf, Path::new("<string>")).expect("write to Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is UTF-8")
    }
}
