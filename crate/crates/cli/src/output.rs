use std::io::Write;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Text,
}

/// One command's output in all three formats.
pub struct Report {
    /// Serialized as-is, with `"schema"` prepended. Non-object values are
    /// wrapped as `{"schema": .., "rows": ..}`.
    pub json: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub text: String,
}

impl Report {
    pub fn new(value: &impl Serialize) -> Self {
        Report {
            json: serde_json::to_value(value).expect("reports serialize"),
            header: Vec::new(),
            rows: Vec::new(),
            text: String::new(),
        }
    }

    pub fn table(mut self, header: Vec<&'static str>, rows: Vec<Vec<String>>) -> Self {
        self.header = header;
        self.rows = rows;
        self
    }

    pub fn text(mut self, text: String) -> Self {
        self.text = text;
        self
    }

    pub fn emit(self, format: Format) {
        let stdout = std::io::stdout();
        let mut out = stdout.lock();
        match format {
            Format::Json => {
                let mut doc = Map::new();
                doc.insert("schema".into(), lintersect::SCHEMA_VERSION.into());
                match self.json {
                    Value::Object(fields) => doc.extend(fields),
                    other => {
                        doc.insert("rows".into(), other);
                    }
                }
                let text = serde_json::to_string_pretty(&Value::Object(doc)).expect("json");
                let _ = writeln!(out, "{text}");
            }
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                let _ = w.write_record(&self.header);
                for row in &self.rows {
                    let _ = w.write_record(row);
                }
                let _ = w.flush();
            }
            Format::Text => {
                let _ = write!(out, "{}", self.text);
            }
        }
    }
}

pub fn cells<const N: usize>(values: [&dyn ToString; N]) -> Vec<String> {
    values.iter().map(|v| v.to_string()).collect()
}
