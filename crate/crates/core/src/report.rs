//! Tabular reports rendered as CSV, Markdown or JSON.
//!
//! Rounding happens only here, and only for CSV and Markdown; JSON carries
//! full precision. Intervals occupy one Markdown cell (`[lo,hi]`) but two CSV
//! columns (`<name>_lo`, `<name>_hi`).

use std::io::{self, Write};

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::interval::Interval;

/// Version tag written into every JSON report.
pub const JSON_SCHEMA: &str = "prevalence-bounds/1";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    #[default]
    Markdown,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    Count(u64),
    Number(f64),
    Interval(Interval),
    Empty,
}

impl From<Interval> for Cell {
    fn from(iv: Interval) -> Self {
        Cell::Interval(iv)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Column index by name.
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

/// A command's output: its parameters and one table.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub parameters: Value,
    pub table: Table,
}

fn number(x: f64, digits: usize) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.digits$}")
    }
}

fn cell_text(cell: &Cell, digits: usize) -> String {
    match cell {
        Cell::Text(s) => s.clone(),
        Cell::Count(n) => n.to_string(),
        Cell::Number(x) => number(*x, digits),
        Cell::Interval(iv) => iv.display_rounded(digits),
        Cell::Empty => String::new(),
    }
}

fn cell_json(cell: &Cell) -> Value {
    match cell {
        Cell::Text(s) => json!(s),
        Cell::Count(n) => json!(n),
        Cell::Number(x) if x.is_finite() => json!(x),
        Cell::Number(x) => json!(if *x > 0.0 { "inf" } else { "-inf" }),
        Cell::Interval(iv) => serde_json::to_value(iv).expect("interval serializes"),
        Cell::Empty => Value::Null,
    }
}

impl Report {
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .table
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .table
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(c, v)| (c.clone(), cell_json(v)))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        json!({
            "schema": JSON_SCHEMA,
            "command": self.command,
            "parameters": self.parameters,
            "columns": self.table.columns,
            "rows": rows,
        })
    }

    pub fn render<W: Write>(&self, format: OutputFormat, digits: usize, out: &mut W) -> io::Result<()> {
        match format {
            OutputFormat::Json => {
                serde_json::to_writer_pretty(&mut *out, &self.to_json())?;
                writeln!(out)
            }
            OutputFormat::Markdown => self.render_markdown(digits, out),
            OutputFormat::Csv => self.render_csv(digits, out),
        }
    }

    fn render_markdown<W: Write>(&self, digits: usize, out: &mut W) -> io::Result<()> {
        let t = &self.table;
        let cells: Vec<Vec<String>> = t
            .rows
            .iter()
            .map(|r| r.iter().map(|c| cell_text(c, digits)).collect())
            .collect();
        let widths: Vec<usize> = t
            .columns
            .iter()
            .enumerate()
            .map(|(i, c)| cells.iter().map(|r| r[i].len()).chain([c.len(), 3]).max().unwrap_or(3))
            .collect();
        let line = |items: Vec<String>| {
            let padded: Vec<String> = items
                .iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:<w$}"))
                .collect();
            format!("| {} |", padded.join(" | "))
        };
        writeln!(out, "{}", line(t.columns.clone()))?;
        writeln!(out, "{}", line(widths.iter().map(|w| "-".repeat(*w)).collect()))?;
        for row in cells {
            writeln!(out, "{}", line(row))?;
        }
        Ok(())
    }

    fn render_csv<W: Write>(&self, digits: usize, out: &mut W) -> io::Result<()> {
        let t = &self.table;
        let is_interval: Vec<bool> = (0..t.columns.len())
            .map(|i| t.rows.iter().any(|r| matches!(r[i], Cell::Interval(_))))
            .collect();
        let mut wtr = csv::Writer::from_writer(out);
        let mut header = Vec::new();
        for (c, split) in t.columns.iter().zip(&is_interval) {
            if *split {
                header.push(format!("{c}_lo"));
                header.push(format!("{c}_hi"));
            } else {
                header.push(c.clone());
            }
        }
        wtr.write_record(&header)?;
        for row in &t.rows {
            let mut rec = Vec::new();
            for (cell, split) in row.iter().zip(&is_interval) {
                match (cell, split) {
                    (Cell::Interval(iv), _) => {
                        rec.push(number(iv.lo, digits));
                        rec.push(number(iv.hi, digits));
                    }
                    (other, true) => {
                        rec.push(cell_text(other, digits));
                        rec.push(String::new());
                    }
                    (other, false) => rec.push(cell_text(other, digits)),
                }
            }
            wtr.write_record(&rec)?;
        }
        wtr.flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut table = Table::new(["family", "prevalence"]);
        table.push(vec!["worst-case".into(), Interval { lo: 0.01, hi: 1.0 }.into()]);
        table.push(vec!["ifr".into(), Interval { lo: 0.002, hi: f64::INFINITY }.into()]);
        Report {
            command: "bounds".into(),
            parameters: json!({}),
            table,
        }
    }

    #[test]
    fn markdown_rounds() {
        let mut buf = Vec::new();
        sample().render(OutputFormat::Markdown, 3, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.contains("[0.010,1.000]"));
        assert!(text.contains("[0.002,inf]"));
        assert!(text.lines().nth(1).unwrap().starts_with("| ---"));
    }

    #[test]
    fn csv_splits_intervals() {
        let mut buf = Vec::new();
        sample().render(OutputFormat::Csv, 2, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("family,prevalence_lo,prevalence_hi"));
        assert_eq!(lines.next(), Some("worst-case,0.01,1.00"));
        assert_eq!(lines.next(), Some("ifr,0.00,inf"));
    }

    #[test]
    fn json_is_versioned_and_unrounded() {
        let v = sample().to_json();
        assert_eq!(v["schema"], JSON_SCHEMA);
        assert_eq!(v["rows"][0]["prevalence"]["lo"], 0.01);
        assert_eq!(v["rows"][1]["prevalence"]["hi"], "inf");
    }
}
