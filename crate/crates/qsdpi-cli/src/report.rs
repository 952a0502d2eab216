//! Structured reports and their JSON and CSV renderings.
//!
//! Reports are deterministic functions of the inputs: keys are sorted, floats print in
//! shortest round-trip form and timings go to stderr instead.

use qsdpi::CMat;
use serde_json::{json, Map, Value};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Report,
    Csv,
}

/// Rows with a fixed header, rendered as the CSV body.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        self.rows.iter().map(|r| r[k].as_f64()).collect()
    }

    fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|r| {
                    Value::Object(self.header.iter().cloned().zip(r.iter().cloned()).collect::<Map<_, _>>())
                })
                .collect(),
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub fields: Map<String, Value>,
    pub table: Option<Table>,
    /// Set when an order asked for with `--assert` was falsified.
    pub assertion_failed: bool,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut r = Self::default();
        r.set("command", command);
        r
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) {
        self.fields.insert(key.to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.fields.get(key)
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.fields.get(key).and_then(Value::as_f64)
    }

    pub fn render(&self, format: OutputFormat) -> Result<String, CliError> {
        match format {
            OutputFormat::Report => {
                let mut all = self.fields.clone();
                if let Some(t) = &self.table {
                    all.insert("table".into(), t.to_json());
                }
                let mut s = serde_json::to_string_pretty(&Value::Object(all))
                    .map_err(|e| CliError::Io(e.to_string()))?;
                s.push('\n');
                Ok(s)
            }
            OutputFormat::Csv => self.render_csv(),
        }
    }

    /// The table when there is one, otherwise `key,value` rows of the flattened fields.
    fn render_csv(&self) -> Result<String, CliError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(e.to_string());
        match &self.table {
            Some(t) => {
                w.write_record(&t.header).map_err(io)?;
                for row in &t.rows {
                    w.write_record(row.iter().map(cell)).map_err(io)?;
                }
            }
            None => {
                w.write_record(["key", "value"]).map_err(io)?;
                let mut flat = Vec::new();
                flatten("", &Value::Object(self.fields.clone()), &mut flat);
                for (k, v) in flat {
                    w.write_record([k, v]).map_err(io)?;
                }
            }
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, v)| flatten(&key(k), v, out)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, v)| flatten(&key(&i.to_string()), v, out)),
        other => out.push((prefix.to_string(), cell(other))),
    }
}

/// JSON number, or the strings "inf", "-inf" and "nan".
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("nan")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

pub fn matrix(m: &CMat) -> Value {
    serde_json::to_value(crate::channel_file::MatrixFile::from_matrix(m)).unwrap_or(Value::Null)
}

/// Display scale for entropic quantities.
#[derive(Clone, Copy, Debug)]
pub struct Units {
    pub bits: bool,
}

impl Units {
    pub fn name(&self) -> &'static str {
        if self.bits {
            "bits"
        } else {
            "nats"
        }
    }

    pub fn entropic(&self, x: f64) -> Value {
        num(if self.bits { x / std::f64::consts::LN_2 } else { x })
    }
}
