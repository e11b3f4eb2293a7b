use std::fmt::{self, Write as _};

use crate::error::{invalid, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Int(i) => Some(*i as f64),
            Cell::Float(x) => Some(*x),
            Cell::Text(_) => None,
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(i) => write!(f, "{i}"),
            Cell::Float(x) => write!(f, "{x:e}"),
            Cell::Text(s) if s.contains([',', '"', '\n']) => write!(f, "\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Provenance {
    pub config_hash: String,
    pub seed: u64,
}

/// Named columns, typed rows and provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultTable {
    schema: Vec<String>,
    rows: Vec<Vec<Cell>>,
    pub provenance: Provenance,
}

impl ResultTable {
    pub fn new<S: Into<String>>(schema: impl IntoIterator<Item = S>, seed: u64) -> Self {
        ResultTable {
            schema: schema.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
            provenance: Provenance { config_hash: String::new(), seed },
        }
    }

    pub fn schema(&self) -> &[String] {
        &self.schema
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.schema.len() {
            return Err(invalid(format!(
                "row has {} cells, schema has {} columns",
                row.len(),
                self.schema.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.schema.iter().position(|c| c == name)
    }

    pub fn numeric_column(&self, name: &str) -> Result<Vec<f64>> {
        let i = self
            .column_index(name)
            .ok_or_else(|| invalid(format!("no column {name:?}")))?;
        self.rows
            .iter()
            .map(|r| r[i].as_f64().ok_or_else(|| invalid(format!("column {name:?} is not numeric"))))
            .collect()
    }

    pub fn cell(&self, row: usize, name: &str) -> Option<&Cell> {
        self.column_index(name).and_then(|i| self.rows.get(row).map(|r| &r[i]))
    }

    /// Append the rows of another table with the same schema.
    pub fn extend(&mut self, other: ResultTable) -> Result<()> {
        if other.schema != self.schema {
            return Err(invalid("schema mismatch"));
        }
        self.rows.extend(other.rows);
        Ok(())
    }

    /// CSV text with a leading `#` provenance line.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "# config_sha256={} seed={}",
            self.provenance.config_hash, self.provenance.seed
        );
        s.push_str(&self.schema.join(","));
        s.push('\n');
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(|c| c.to_string()).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

fn split_csv_line(line: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    let mut chars = line.chars().peekable();
    while let Some(c) = chars.next() {
        match (c, quoted) {
            ('"', true) if chars.peek() == Some(&'"') => {
                cur.push('"');
                chars.next();
            }
            ('"', _) => quoted = !quoted,
            (',', false) => out.push(std::mem::take(&mut cur)),
            _ => cur.push(c),
        }
    }
    out.push(cur);
    out
}

fn parse_cell(s: &str) -> Cell {
    if let Ok(i) = s.parse::<i64>() {
        Cell::Int(i)
    } else if let Ok(x) = s.parse::<f64>() {
        Cell::Float(x)
    } else {
        Cell::Text(s.to_string())
    }
}

impl ResultTable {
    /// Parse the output of [`ResultTable::to_csv`]. Cells are typed by their text.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut provenance = Provenance::default();
        let mut lines = text.lines().peekable();
        while let Some(l) = lines.peek() {
            let Some(rest) = l.strip_prefix('#') else { break };
            for kv in rest.split_whitespace() {
                match kv.split_once('=') {
                    Some(("config_sha256", v)) => provenance.config_hash = v.to_string(),
                    Some(("seed", v)) => {
                        provenance.seed = v.parse().map_err(|_| invalid(format!("bad seed {v:?}")))?
                    }
                    _ => {}
                }
            }
            lines.next();
        }
        let header = lines.next().ok_or_else(|| invalid("CSV without header"))?;
        let mut table = ResultTable::new(split_csv_line(header), provenance.seed);
        table.provenance = provenance;
        for l in lines.filter(|l| !l.is_empty()) {
            table.push(split_csv_line(l).iter().map(|c| parse_cell(c)).collect())?;
        }
        Ok(table)
    }
}
