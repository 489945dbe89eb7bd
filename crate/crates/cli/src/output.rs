//! Report envelope and the JSON / CSV writers.

use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, thiserror::Error)]
pub enum RenderError {
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Every report carries the tool identity, the fully resolved
/// configuration and the master seed, so a run can be reproduced from the
/// report alone.
#[derive(Serialize)]
pub struct Envelope<'a, C: Serialize, R: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub seed: u64,
    pub config: &'a C,
    pub result: &'a R,
}

impl<'a, C: Serialize, R: Serialize> Envelope<'a, C, R> {
    pub fn new(command: &'a str, seed: u64, config: &'a C, result: &'a R) -> Self {
        Envelope {
            tool: "csi-wiretap",
            version: env!("CARGO_PKG_VERSION"),
            command,
            seed,
            config,
            result,
        }
    }
}

/// Flattens a JSON tree into `(path, value)` pairs, joining keys and array
/// indices with dots.
pub fn flatten(value: &Value) -> Vec<(String, String)> {
    fn walk(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
        let key = |k: &str| {
            if prefix.is_empty() {
                k.to_string()
            } else {
                format!("{prefix}.{k}")
            }
        };
        match v {
            Value::Object(map) => {
                for (k, child) in map {
                    walk(&key(k), child, out);
                }
            }
            Value::Array(items) => {
                for (i, child) in items.iter().enumerate() {
                    walk(&key(&i.to_string()), child, out);
                }
            }
            Value::Null => out.push((prefix.to_string(), String::new())),
            Value::String(s) => out.push((prefix.to_string(), s.clone())),
            other => out.push((prefix.to_string(), other.to_string())),
        }
    }
    let mut out = Vec::new();
    walk("", value, &mut out);
    out
}

pub fn render(value: &Value, format: Format) -> Result<Vec<u8>, RenderError> {
    match format {
        Format::Json => {
            let mut bytes = serde_json::to_vec_pretty(value)?;
            bytes.push(b'\n');
            Ok(bytes)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["field", "value"])?;
            for (k, v) in flatten(value) {
                w.write_record([k, v])?;
            }
            Ok(w.into_inner().map_err(|e| e.into_error())?)
        }
    }
}

/// Writes the rendered report to `path`, or to stdout when no path is given.
pub fn emit(bytes: &[u8], path: Option<&Path>) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, bytes),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flattening_paths() {
        let v = json!({"a": {"b": [1, 2]}, "c": null, "d": "x"});
        let f = flatten(&v);
        assert_eq!(
            f,
            vec![
                ("a.b.0".to_string(), "1".to_string()),
                ("a.b.1".to_string(), "2".to_string()),
                ("c".to_string(), String::new()),
                ("d".to_string(), "x".to_string()),
            ]
        );
    }

    #[test]
    fn csv_has_header() {
        let bytes = render(&json!({"k": 1.5}), Format::Csv).unwrap();
        assert_eq!(String::from_utf8(bytes).unwrap(), "field,value\nk,1.5\n");
    }
}
