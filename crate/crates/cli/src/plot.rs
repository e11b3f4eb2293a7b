//! Two-column series files for plotting.

use std::fmt::Write as _;
use std::str::FromStr;

use qdnls::{Error, ResultTable, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Transform {
    Linear,
    LogLog,
}

impl FromStr for Transform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Transform::Linear),
            "log-log" | "loglog" => Ok(Transform::LogLog),
            _ => Err(Error::InvalidParameter(format!("unknown transform {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Series {
    pub points: Vec<(f64, f64)>,
    pub warnings: Vec<String>,
    /// Points dropped by the log transform.
    pub dropped: usize,
}

impl Series {
    /// Whitespace-separated `x y` lines.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (x, y) in &self.points {
            let _ = writeln!(s, "{x:e} {y:e}");
        }
        s
    }
}

/// (x, y) columns of a table, with natural logs under [`Transform::LogLog`].
pub fn emit_plot_data(table: &ResultTable, x: &str, y: &str, transform: Transform) -> Result<Series> {
    let xs = table.numeric_column(x)?;
    let ys = table.numeric_column(y)?;
    let mut out = Series::default();
    if xs.is_empty() {
        out.warnings.push("empty table, empty series".into());
        return Ok(out);
    }
    for (a, b) in xs.into_iter().zip(ys) {
        match transform {
            Transform::Linear => out.points.push((a, b)),
            Transform::LogLog if a > 0.0 && b > 0.0 => out.points.push((a.ln(), b.ln())),
            Transform::LogLog => out.dropped += 1,
        }
    }
    if out.dropped > 0 {
        out.warnings.push(format!("dropped {} nonpositive points under log-log", out.dropped));
    }
    Ok(out)
}
