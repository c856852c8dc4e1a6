//! Tables written as CSV or as a JSON document `{config, rows, report}`.
//!
//! Every float passes through [`round15`] first, so both encodings carry the
//! same values.

use std::fs::File;
use std::io::{self, Write};

use serde_json::{Map, Value};

use crate::config::{Format, RunConfig};
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
    }
}

/// Rounds to 15 significant digits.
pub fn round15(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if !x.is_finite() {
        return x;
    }
    format!("{x:.14e}").parse().expect("formatted float parses")
}

pub fn format_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let r = round15(x);
    if r == 0.0 {
        "0".into()
    } else if (1e-5..1e15).contains(&r.abs()) {
        r.to_string()
    } else {
        format!("{r:e}")
    }
}

pub fn num_value(x: f64) -> Value {
    match serde_json::Number::from_f64(round15(x)) {
        Some(n) => Value::Number(n),
        None => Value::String(format_num(x)),
    }
}

/// Converts a serialized value, replacing floats by their 15-digit form.
///
/// serde_json turns non-finite floats into `null`; callers that may carry
/// them build the value by hand with [`num_value`].
pub fn rounded(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => num_value(n.as_f64().expect("f64 number")),
        Value::Array(a) => Value::Array(a.into_iter().map(rounded).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, rounded(v))).collect()),
        other => other,
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::Num(x) => format_num(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(t) => t.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => num_value(*x),
            Cell::Int(i) => Value::from(*i),
            Cell::Text(t) => Value::String(t.clone()),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub report: Map<String, Value>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            ..Table::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn report(&mut self, key: &str, value: Value) {
        self.report.insert(key.to_string(), rounded(value));
    }

    pub fn report_num(&mut self, key: &str, x: f64) {
        self.report.insert(key.to_string(), num_value(x));
    }

    fn write_csv<W: Write>(&self, w: W) -> Result<(), CliError> {
        let mut out = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(w);
        let io = |e: csv::Error| CliError::Io(io::Error::other(e));
        out.write_record(&self.columns).map_err(io)?;
        for row in &self.rows {
            out.write_record(row.iter().map(Cell::text)).map_err(io)?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_json(&self, config: &RunConfig) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|r| {
                Value::Object(
                    self.columns
                        .iter()
                        .map(|c| c.to_string())
                        .zip(r.iter().map(Cell::json))
                        .collect(),
                )
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("config".into(), config.to_json());
        doc.insert("rows".into(), Value::Array(rows));
        doc.insert("report".into(), Value::Object(self.report.clone()));
        Value::Object(doc)
    }

    fn write_json<W: Write>(&self, config: &RunConfig, mut w: W) -> Result<(), CliError> {
        serde_json::to_writer_pretty(&mut w, &self.to_json(config))
            .map_err(|e| CliError::Io(io::Error::other(e)))?;
        writeln!(w)?;
        w.flush()?;
        Ok(())
    }

    pub fn emit(&self, config: &RunConfig) -> Result<(), CliError> {
        let sink: Box<dyn Write> = match &config.out {
            Some(path) => Box::new(io::BufWriter::new(File::create(path)?)),
            None => Box::new(io::BufWriter::new(io::stdout().lock())),
        };
        match config.format {
            Format::Csv => self.write_csv(sink),
            Format::Json => self.write_json(config, sink),
        }
    }
}
