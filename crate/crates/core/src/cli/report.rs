//! Tabular reports rendered as aligned text, CSV or JSON.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Section {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Section {
    pub fn new(name: impl Into<String>, header: Vec<String>) -> Self {
        Section { name: name.into(), header, rows: Vec::new() }
    }

    pub fn row(mut self, row: Vec<String>) -> Self {
        self.rows.push(row);
        self
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    /// Cell lookup by row label (first column) and header name.
    pub fn cell(&self, row_label: &str, column: &str) -> Option<&str> {
        let col = self.header.iter().position(|h| h == column)?;
        let row = self.rows.iter().find(|r| r.first().map(String::as_str) == Some(row_label))?;
        row.get(col).map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Report {
    pub sections: Vec<Section>,
}

impl Report {
    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Text => self.render_text(),
            OutputFormat::Csv => self.render_csv(),
            OutputFormat::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("report serializes");
                s.push('\n');
                s
            }
        }
    }

    fn render_text(&self) -> String {
        let mut out = String::new();
        for (i, section) in self.sections.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let _ = writeln!(out, "== {} ==", section.name);
            let cols = section.rows.iter().map(Vec::len).chain([section.header.len()]).max().unwrap_or(0);
            let mut widths = vec![0; cols];
            for row in std::iter::once(&section.header).chain(&section.rows) {
                for (w, cell) in widths.iter_mut().zip(row) {
                    *w = (*w).max(cell.chars().count());
                }
            }
            for row in std::iter::once(&section.header).chain(&section.rows) {
                let cells: Vec<String> = row
                    .iter()
                    .zip(&widths)
                    .enumerate()
                    .map(|(c, (cell, &w))| if c == 0 { format!("{cell:<w$}") } else { format!("{cell:>w$}") })
                    .collect();
                let _ = writeln!(out, "{}", cells.join("  ").trim_end());
            }
        }
        out
    }

    /// Each section is a `# name` line followed by a CSV block; blocks are
    /// separated by a blank line.
    fn render_csv(&self) -> String {
        let mut out = String::new();
        for (i, section) in self.sections.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let _ = writeln!(out, "# {}", section.name);
            let mut writer = csv::WriterBuilder::new().flexible(true).from_writer(Vec::new());
            writer.write_record(&section.header).expect("in-memory write");
            for row in &section.rows {
                writer.write_record(row).expect("in-memory write");
            }
            out.push_str(&String::from_utf8(writer.into_inner().expect("flush")).expect("utf8"));
        }
        out
    }

    /// Inverse of the CSV rendering.
    pub fn parse_csv(text: &str) -> Result<Report, csv::Error> {
        let mut sections = Vec::new();
        for block in text.split("\n\n") {
            let Some((title, body)) = block.split_once('\n') else { continue };
            let name = title.trim_start_matches("# ").to_string();
            let mut reader = csv::ReaderBuilder::new().has_headers(false).flexible(true).from_reader(body.as_bytes());
            let mut records = reader.records();
            let header = match records.next() {
                Some(r) => r?.iter().map(String::from).collect(),
                None => Vec::new(),
            };
            let rows = records.map(|r| r.map(|r| r.iter().map(String::from).collect())).collect::<Result<_, _>>()?;
            sections.push(Section { name, header, rows });
        }
        Ok(Report { sections })
    }
}

/// `x{id}` node label.
pub fn node_label(node: usize) -> String {
    format!("x{node}")
}

pub fn distance_cell(d: Option<i64>) -> String {
    d.map_or_else(|| "-".to_string(), |v| v.to_string())
}
