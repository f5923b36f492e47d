//! CSV tables with a provenance header.
//!
//! Every table starts with `# optosqueeze <version> config_sha256=<hex>`,
//! optionally followed by more `#` comment lines, then the column names.
//! Numbers use Rust's shortest round-trip formatting, so identical inputs give
//! byte-identical files.

use std::fmt::Display;

use crate::config::Config;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub comments: Vec<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Rows whose status is not `ok`.
    pub failed_rows: usize,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Table::default()
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Parsed numeric column; unparsable cells become NaN.
    pub fn numeric_column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.column(name)?;
        Some(
            self.rows
                .iter()
                .map(|r| r[k].parse().unwrap_or(f64::NAN))
                .collect(),
        )
    }

    pub fn to_csv(&self, config: &Config) -> String {
        let mut out = format!("# optosqueeze {VERSION} config_sha256={}\n", config.hash());
        for c in &self.comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        out.push_str(&self.columns.join(","));
        out.push('\n');
        for row in &self.rows {
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

pub fn num(v: f64) -> String {
    format!("{v}")
}

pub fn cell(v: impl Display) -> String {
    v.to_string()
}
