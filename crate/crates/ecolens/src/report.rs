//! Output tables and their emission as CSV, JSON, and markdown.
//!
//! Internal arithmetic stays at full precision everywhere; rounding happens
//! here and only for the human-readable formats. JSON output carries the
//! full-precision values.

use std::path::{Path, PathBuf};

use crate::Result;

/// Formats a table can be emitted in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
    Md,
}

impl OutputFormat {
    pub fn extension(&self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
            OutputFormat::Md => "md",
        }
    }
}

/// One table cell. `Missing` renders as an empty cell in CSV/markdown and
/// as `null` in JSON, keeping "not computed" distinct from any number.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Int(i64),
    Float(f64),
    Missing,
}

impl Cell {
    pub fn text(value: impl Into<String>) -> Self {
        Cell::Text(value.into())
    }

    pub fn opt_float(value: Option<f64>) -> Self {
        match value {
            Some(v) => Cell::Float(v),
            None => Cell::Missing,
        }
    }

    pub fn bool(value: bool) -> Self {
        Cell::Text(if value { "true" } else { "false" }.to_string())
    }

    fn render(&self, precision: usize) -> String {
        match self {
            Cell::Text(s) => s.clone(),
            Cell::Int(i) => i.to_string(),
            Cell::Float(v) => render_float(*v, precision),
            Cell::Missing => String::new(),
        }
    }

    fn to_json(&self) -> serde_json::Value {
        match self {
            Cell::Text(s) => serde_json::Value::String(s.clone()),
            Cell::Int(i) => serde_json::Value::from(*i),
            Cell::Float(v) => serde_json::Value::from(*v),
            Cell::Missing => serde_json::Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
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

/// Rounds for display. A value that rounds to zero never keeps a minus sign.
fn render_float(value: f64, precision: usize) -> String {
    let s = format!("{value:.precision$}");
    if s.starts_with('-') && s[1..].bytes().all(|b| b == b'0' || b == b'.') {
        s[1..].to_string()
    } else {
        s
    }
}

/// A named table with a fixed column set.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Row arity must match the column set; tables are built by this crate,
    /// so a mismatch is a bug, not an input error.
    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(
            row.len(),
            self.columns.len(),
            "row arity mismatch in table {}",
            self.name
        );
        self.rows.push(row);
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn to_csv(&self, precision: usize) -> String {
        let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
        writer
            .write_record(&self.columns)
            .expect("writing to a Vec cannot fail");
        for row in &self.rows {
            writer
                .write_record(row.iter().map(|c| c.render(precision)))
                .expect("writing to a Vec cannot fail");
        }
        String::from_utf8(writer.into_inner().expect("no partial flush")).unwrap()
    }

    pub fn to_markdown(&self, precision: usize) -> String {
        let escape = |s: String| s.replace('|', "\\|");
        let mut out = String::new();
        out.push_str("| ");
        out.push_str(&self.columns.join(" | "));
        out.push_str(" |\n|");
        for _ in &self.columns {
            out.push_str(" --- |");
        }
        out.push('\n');
        for row in &self.rows {
            out.push_str("| ");
            let rendered: Vec<String> =
                row.iter().map(|c| escape(c.render(precision))).collect();
            out.push_str(&rendered.join(" | "));
            out.push_str(" |\n");
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: serde_json::Map<String, serde_json::Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(col, cell)| (col.clone(), cell.to_json()))
                    .collect();
                serde_json::Value::Object(obj)
            })
            .collect();
        let doc = serde_json::json!({ "table": self.name, "rows": rows });
        let mut s = serde_json::to_string_pretty(&doc).expect("tables contain no non-finite floats");
        s.push('\n');
        s
    }

    fn render_as(&self, format: OutputFormat, precision: usize) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(precision),
            OutputFormat::Json => self.to_json(),
            OutputFormat::Md => self.to_markdown(precision),
        }
    }
}

/// Writes every table in every requested format under `out_dir`, one file
/// per table per format, named `<table>.<ext>`. Returns the paths written,
/// in emission order.
pub fn write_tables(
    tables: &[Table],
    out_dir: &Path,
    formats: &[OutputFormat],
    precision: usize,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    for table in tables {
        for format in formats {
            let path = out_dir.join(format!("{}.{}", table.name, format.extension()));
            std::fs::write(&path, table.render_as(*format, precision))?;
            written.push(path);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new("sample", &["model", "accuracy", "note"]);
        t.push(vec![
            Cell::text("nova-1"),
            Cell::Float(0.8528571428571429),
            Cell::Missing,
        ]);
        t.push(vec![
            Cell::text("orion|9b"),
            Cell::Float(-0.00001),
            Cell::text("tie"),
        ]);
        t
    }

    #[test]
    fn csv_rounds_to_the_requested_precision() {
        let csv = sample().to_csv(3);
        assert!(csv.contains("nova-1,0.853,"), "{csv}");
        // A float that rounds to zero loses its sign.
        assert!(csv.contains("0.000"), "{csv}");
        assert!(!csv.contains("-0.000"), "{csv}");
    }

    #[test]
    fn json_keeps_full_precision_and_nulls() {
        let json = sample().to_json();
        assert!(json.contains("0.8528571428571429"), "{json}");
        assert!(json.contains("null"), "{json}");
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["rows"][0]["accuracy"].as_f64(), Some(0.8528571428571429));
    }

    #[test]
    fn markdown_escapes_pipes() {
        let md = sample().to_markdown(3);
        assert!(md.contains("orion\\|9b"), "{md}");
        assert!(md.starts_with("| model | accuracy | note |\n| --- | --- | --- |\n"));
    }

    #[test]
    fn csv_quotes_embedded_commas() {
        let mut t = Table::new("quoting", &["text"]);
        t.push(vec![Cell::text("a, b")]);
        assert_eq!(t.to_csv(3), "text\n\"a, b\"\n");
    }

    #[test]
    fn write_tables_emits_one_file_per_table_per_format() {
        let dir = tempfile::tempdir().unwrap();
        let tables = [sample()];
        let written = write_tables(
            &tables,
            dir.path(),
            &[OutputFormat::Csv, OutputFormat::Json, OutputFormat::Md],
            3,
        )
        .unwrap();
        assert_eq!(written.len(), 3);
        for path in written {
            assert!(path.exists());
        }
    }

    #[test]
    fn precision_zero_is_valid() {
        let mut t = Table::new("p0", &["v"]);
        t.push(vec![Cell::Float(0.6)]);
        assert_eq!(t.to_csv(0), "v\n1\n");
    }
}
