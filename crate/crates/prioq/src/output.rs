//! Rendering of command results as JSON, CSV or text.

use std::fmt::Write as _;

use clap::ValueEnum;
use prioq_core::ModelParams;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Text,
    Json,
    Csv,
}

pub const SIGNIFICANT_DIGITS: usize = 9;

pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

/// A JSON number rounded to [`SIGNIFICANT_DIGITS`]; non-finite values become
/// `null`.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(round_sig(x)).map_or(Value::Null, Value::Number)
}

pub fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

pub fn params_json(params: &ModelParams) -> Value {
    json!({
        "lambda1": num(params.lambda1),
        "lambda2": num(params.lambda2),
        "mu": num(params.mu),
        "rho": num(params.rho()),
    })
}

/// Scalar rendering shared by the CSV and text formats. `null` is empty.
pub fn scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn csv_line<I, S>(fields: I) -> String
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let fields: Vec<String> = fields.into_iter().map(|f| csv_field(f.as_ref())).collect();
    fields.join(",")
}

fn flatten(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, v, out);
            }
        }
        other => out.push((prefix.to_string(), scalar(other))),
    }
}

/// The uniform result shape: `{params, engine, metrics, diagnostics}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub params: Value,
    pub engine: String,
    pub metrics: Map<String, Value>,
    pub diagnostics: Map<String, Value>,
}

impl Document {
    pub fn new(params: &ModelParams, engine: &str) -> Self {
        Self {
            params: params_json(params),
            engine: engine.to_string(),
            metrics: Map::new(),
            diagnostics: Map::new(),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "params": self.params,
            "engine": self.engine,
            "metrics": self.metrics,
            "diagnostics": self.diagnostics,
        })
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.to_json()).expect("serializable");
                s.push('\n');
                s
            }
            Format::Csv => {
                let mut cells = Vec::new();
                flatten("", &self.params, &mut cells);
                cells.push(("engine".into(), self.engine.clone()));
                flatten("", &Value::Object(self.metrics.clone()), &mut cells);
                flatten("", &Value::Object(self.diagnostics.clone()), &mut cells);
                let (header, row): (Vec<_>, Vec<_>) = cells.into_iter().unzip();
                format!("{}\n{}\n", csv_line(header), csv_line(row))
            }
            Format::Text => {
                let mut s = String::new();
                let mut section = |title: &str, value: &Value| {
                    let mut cells = Vec::new();
                    flatten("", value, &mut cells);
                    let _ = writeln!(s, "{title}");
                    for (k, v) in cells {
                        let v = if v.is_empty() {
                            "unavailable".into()
                        } else {
                            v
                        };
                        let _ = writeln!(s, "  {k:<34} {v}");
                    }
                };
                section("params", &self.params);
                section(
                    &format!("metrics ({})", self.engine),
                    &Value::Object(self.metrics.clone()),
                );
                section("diagnostics", &Value::Object(self.diagnostics.clone()));
                s
            }
        }
    }
}
