use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde_json::Value;

/// Rounds every float to 12 significant digits so that reruns are
/// byte-identical.
pub fn round_floats(value: &mut Value) {
    match value {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(0.0);
            *value = serde_json::Number::from_f64(round12(x)).map_or(Value::Null, Value::Number);
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

pub fn round12(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

pub struct Sink {
    pub out: Option<PathBuf>,
}

impl Sink {
    pub fn json(&self, command: &str, mut value: Value) -> Result<()> {
        round_floats(&mut value);
        let text = serde_json::to_string_pretty(&value)? + "\n";
        match &self.out {
            Some(dir) => {
                fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
                let path = dir.join(format!("{command}.json"));
                fs::write(&path, text).with_context(|| format!("cannot write {}", path.display()))
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes())?;
                Ok(stdout.flush()?)
            }
        }
    }

    pub fn csv(&self, command: &str, header: &[String], rows: &[Vec<Option<f64>>]) -> Result<PathBuf> {
        let dir = self.out.clone().unwrap_or_else(|| PathBuf::from("."));
        fs::create_dir_all(&dir).with_context(|| format!("cannot create {}", dir.display()))?;
        let path = dir.join(format!("{command}_trace.csv"));
        write_csv(&path, header, rows)?;
        Ok(path)
    }
}

fn write_csv(path: &Path, header: &[String], rows: &[Vec<Option<f64>>]) -> Result<()> {
    let mut text = header.join(",");
    text.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|c| c.map(|x| round12(x).to_string()).unwrap_or_default()).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}
