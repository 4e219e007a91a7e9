//! CSV artifacts with a one-line JSON header comment.
//!
//! ```text
//! # {"experiment":"fm-scan",...}
//! distance_kind,distance,mean,stderr,n,excluded
//! dH_mod,0,0.41,0.002,1,0
//! ```

use std::fmt::Display;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::Value;

use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub struct CsvTable {
    pub header: Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Shortest round-trip decimal form; `-0` prints as `0`.
pub fn num(v: f64) -> String {
    format!("{}", if v == 0.0 { 0.0 } else { v })
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: Value, columns: impl IntoIterator<Item = S>) -> CsvTable {
        CsvTable {
            header,
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<D: Display>(&mut self, row: impl IntoIterator<Item = D>) {
        let row: Vec<String> = row.into_iter().map(|c| c.to_string()).collect();
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Column line plus data rows, without the header comment.
    pub fn body(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }

    pub fn render(&self) -> String {
        format!("# {}\n{}", self.header, self.body())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir)?;
        }
        let mut f = fs::File::create(path)?;
        f.write_all(self.render().as_bytes())?;
        Ok(())
    }

    /// Parse a rendered table back (header, columns, rows).
    pub fn parse(text: &str) -> Result<CsvTable> {
        let mut lines = text.lines();
        let first = lines.next().unwrap_or_default();
        let json = first.strip_prefix("# ").ok_or_else(|| {
            crate::error::Error::Domain("CSV artifact must start with a '# {json}' line".into())
        })?;
        let header: Value = serde_json::from_str(json)?;
        let columns = lines
            .next()
            .map(|l| l.split(',').map(str::to_owned).collect())
            .unwrap_or_default();
        let rows = lines.map(|l| l.split(',').map(str::to_owned).collect()).collect();
        Ok(CsvTable { header, columns, rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn round_trip() {
        let mut t = CsvTable::new(json!({"seed": 3, "eta": 1e-6}), ["a", "b"]);
        t.push([num(0.1), num(f64::INFINITY)]);
        t.push(["x", "y"]);
        let text = t.render();
        assert!(text.starts_with("# {"));
        assert_eq!(CsvTable::parse(&text).unwrap(), t);
        assert_eq!(t.body().lines().nth(1), Some("0.1,inf"));
    }

    #[test]
    fn rejects_headerless() {
        assert!(CsvTable::parse("a,b\n1,2\n").is_err());
    }
}
