//! Report and file output. Report floats carry 12 significant digits;
//! generated data files keep full precision.

use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::{CliError, CliResult};

/// x rounded to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

pub fn fmt12(x: f64) -> String {
    round12(x).to_string()
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => serde_json::Number::from_f64(round12(n.as_f64().unwrap_or(0.0)))
            .map(Value::Number)
            .unwrap_or(Value::Null),
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

pub fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Reads and parses a JSON document, naming the file in errors.
pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = read_text(path)?;
    qplab::io::parse(&text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// Full-precision data file.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = qplab::io::to_json(value);
    text.push('\n');
    write_text(path, &text)
}

pub fn emit_report(config: Value, result: Value, path: Option<&Path>) -> CliResult<()> {
    let doc = serde_json::json!({ "config": round_value(config), "result": round_value(result) });
    let mut text = serde_json::to_string_pretty(&doc).expect("json");
    text.push('\n');
    match path {
        Some(p) => write_text(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Writes rows under a fixed header.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
    let io = |e: csv::Error| CliError::Io(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(header).map_err(io)?;
    for r in rows {
        w.write_record(r).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
