use crate::CliError;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

/// Writes CSV and JSON artifacts into one directory, stamped with the input digest.
pub struct Emitter {
    dir: PathBuf,
    pub digest: String,
    command: &'static str,
    seed: Option<u64>,
}

/// SHA-256 of the canonical (key-sorted, compact) form of `inputs`.
pub fn digest(inputs: &Value) -> String {
    hex::encode(Sha256::digest(inputs.to_string().as_bytes()))
}

impl Emitter {
    pub fn new(dir: &Path, inputs: &Value, command: &'static str, seed: Option<u64>) -> Result<Self, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(format!("cannot create {}: {e}", dir.display())))?;
        Ok(Self { dir: dir.to_path_buf(), digest: digest(inputs), command, seed })
    }

    fn write(&self, name: &str, body: &str) -> Result<PathBuf, CliError> {
        let path = self.dir.join(name);
        fs::write(&path, body).map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }

    /// `{schema_version, inputs_digest, results}`.
    pub fn json<T: Serialize>(&self, name: &str, results: &T) -> Result<PathBuf, CliError> {
        let results = serde_json::to_value(results).map_err(|e| CliError::io(e.to_string()))?;
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "inputs_digest": self.digest,
            "results": {
                "run": {"tool": TOOL_VERSION, "command": self.command, "seed": self.seed},
                "report": results,
            },
        });
        let body = serde_json::to_string_pretty(&doc).map_err(|e| CliError::io(e.to_string()))?;
        self.write(name, &(body + "\n"))
    }

    /// CSV with `#` metadata lines and a header row.
    pub fn csv(&self, name: &str, notes: &[String], header: &[&str], rows: &[Vec<f64>]) -> Result<PathBuf, CliError> {
        let mut s = String::new();
        let _ = writeln!(s, "# tool: {TOOL_VERSION}");
        let _ = writeln!(s, "# command: {}", self.command);
        let _ = writeln!(s, "# config_sha256: {}", self.digest);
        for n in notes {
            let _ = writeln!(s, "# {n}");
        }
        s.push_str(&header.join(","));
        s.push('\n');
        for r in rows {
            let cells: Vec<String> = r.iter().map(|x| format!("{x:.16e}")).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        self.write(name, &s)
    }
}

/// JSON has no ±∞ or NaN (serde_json writes null); encode them as strings.
pub fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else if x.is_nan() {
        json!("NaN")
    } else if x > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digest_ignores_key_order_and_whitespace() {
        let a: Value = serde_json::from_str(r#"{"a": 1, "b": [1, 2]}"#).unwrap();
        let b: Value = serde_json::from_str(r#"{ "b":[1,2],"a":1 }"#).unwrap();
        assert_eq!(digest(&a), digest(&b));
        assert_eq!(digest(&a).len(), 64);
    }

    #[test]
    fn non_finite_numbers_become_strings() {
        assert_eq!(num(f64::INFINITY), json!("inf"));
        assert_eq!(num(1.5), json!(1.5));
    }
}
