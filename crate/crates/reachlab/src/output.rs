//! CSV tables with provenance headers, JSON documents, atomic writes.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::CliError;

pub fn float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => float(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Int(b as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.into())
    }
}

/// A CSV table. Rendered as `# reachlab <command> config_hash=<hex>`, a
/// `# units:` line, optional `# key=value` metadata lines, the column row,
/// then data.
#[derive(Debug, Clone)]
pub struct Table {
    pub command: String,
    pub hash: String,
    /// `(column, unit)`, in column order.
    pub columns: Vec<(String, String)>,
    pub meta: Vec<(String, String)>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: &str, hash: &str, columns: &[(&str, &str)]) -> Self {
        Table {
            command: command.into(),
            hash: hash.into(),
            columns: columns.iter().map(|(c, u)| (c.to_string(), u.to_string())).collect(),
            meta: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.into(), value.to_string()));
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn render(&self) -> Vec<u8> {
        let mut out = Vec::new();
        writeln!(out, "# reachlab {} config_hash={}", self.command, self.hash).unwrap();
        let units: Vec<String> = self.columns.iter().map(|(c, u)| format!("{c}={u}")).collect();
        writeln!(out, "# units: {}", units.join(", ")).unwrap();
        for (k, v) in &self.meta {
            writeln!(out, "# {k}={v}").unwrap();
        }
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(self.columns.iter().map(|(c, _)| c.as_str())).unwrap();
            for row in &self.rows {
                w.write_record(row.iter().map(Cell::render)).unwrap();
            }
            w.flush().unwrap();
        }
        out
    }
}

/// Rows of a CSV written by [`Table`], keyed by column name.
pub fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>), CliError> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let header: Vec<String> = r
        .headers()
        .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?
        .iter()
        .map(String::from)
        .collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        rows.push(rec.iter().map(String::from).collect());
    }
    Ok((header, rows))
}

/// A file to be written once the whole computation has succeeded.
#[derive(Debug, Clone)]
pub struct Output {
    pub path: PathBuf,
    pub bytes: Vec<u8>,
}

pub fn json_bytes<T: serde::Serialize>(v: &T) -> Vec<u8> {
    let mut b = serde_json::to_vec_pretty(v).expect("serializable");
    b.push(b'\n');
    b
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23] {
            assert_eq!(float(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(float(1.0), "1.0000000000000000e0");
        assert_eq!(float(f64::INFINITY), "inf");
    }

    #[test]
    fn table_layout() {
        let mut t = Table::new("heat", "abc", &[("t", "time"), ("method", "label")]);
        t.meta("phi", "const:1");
        t.push(vec![0.5.into(), "mc".into()]);
        let s = String::from_utf8(t.render()).unwrap();
        assert_eq!(
            s,
            "# reachlab heat config_hash=abc\n# units: t=time, method=label\n# phi=const:1\nt,method\n5.0000000000000000e-1,mc\n"
        );
    }

    #[test]
    fn atomic_write_and_read_back() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        let mut t = Table::new("heat", "h", &[("t", "time"), ("estimate", "volume")]);
        t.push(vec![0.25.into(), 1.5.into()]);
        write_atomic(&p, &t.render()).unwrap();
        let (h, rows) = read_table(&p).unwrap();
        assert_eq!(h, vec!["t", "estimate"]);
        assert_eq!(rows[0][1].parse::<f64>().unwrap(), 1.5);
        assert!(write_atomic(&dir.path().join("missing/x.csv"), b"1").is_err());
    }
}
