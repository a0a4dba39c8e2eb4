use std::io::Write;

use crate::config::Format;
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

/// Rows in grid order under a fixed header.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

/// Shortest round-trip representation in scientific notation; never
/// locale-dependent.
pub fn fmt_num(v: f64) -> String {
    format!("{v:e}")
}

impl Table {
    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> Result<(), CliError> {
        let io = |e: std::io::Error| CliError::Io(e.to_string());
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                let csv_err = |e: csv::Error| CliError::Io(e.to_string());
                w.write_record(&self.columns).map_err(csv_err)?;
                for row in &self.rows {
                    let fields = row.iter().map(|c| match c {
                        Cell::Num(v) => fmt_num(*v),
                        Cell::Text(s) => s.clone(),
                        Cell::Empty => String::new(),
                    });
                    w.write_record(fields).map_err(csv_err)?;
                }
                w.flush().map_err(io)
            }
            Format::Json => {
                let rows: Vec<Vec<serde_json::Value>> = self
                    .rows
                    .iter()
                    .map(|r| {
                        r.iter()
                            .map(|c| match c {
                                Cell::Num(v) => serde_json::Number::from_f64(*v)
                                    .map_or(serde_json::Value::Null, serde_json::Value::Number),
                                Cell::Text(s) => serde_json::Value::String(s.clone()),
                                Cell::Empty => serde_json::Value::Null,
                            })
                            .collect()
                    })
                    .collect();
                let doc = serde_json::json!({ "columns": self.columns, "rows": rows });
                serde_json::to_writer_pretty(&mut *out, &doc).map_err(|e| CliError::Io(e.to_string()))?;
                writeln!(out).map_err(io)
            }
        }
    }
}
