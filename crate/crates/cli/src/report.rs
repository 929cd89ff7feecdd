use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use otdc_core::fairness::MetricPanel;
use serde_json::{Map, Value};

/// Rounds to 9 significant digits.
pub fn round9(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.8e}").parse().unwrap_or(x)
}

pub fn format_float(x: f64) -> String {
    round9(x).to_string()
}

pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(round9(x)).map_or(Value::Null, Value::Number)
}

pub fn opt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

pub fn panel(p: &MetricPanel) -> Value {
    Value::Object(p.entries().iter().map(|(k, v)| (k.to_string(), num(*v))).collect())
}

/// JSON object builder; keys come out sorted.
#[derive(Default)]
pub struct Report(Map<String, Value>);

impl Report {
    pub fn set(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.0.insert(key.to_string(), value.into());
        self
    }

    pub fn float(self, key: &str, x: f64) -> Self {
        self.set(key, num(x))
    }

    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&Value::Object(self.0.clone())).expect("json values serialise");
        s.push('\n');
        s
    }

    /// Writes to `path`, or to stdout when no path is given.
    pub fn emit(&self, path: Option<&Path>) -> Result<()> {
        match path {
            Some(p) => fs::write(p, self.render()).with_context(|| format!("writing report {}", p.display())),
            None => {
                print!("{}", self.render());
                Ok(())
            }
        }
    }
}
