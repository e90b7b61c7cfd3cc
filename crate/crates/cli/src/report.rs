//! JSON reports and error objects.

use std::fmt;
use std::path::Path;

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA: u64 = 1;
pub const SIG_DIGITS: usize = 12;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const INPUT: i32 = 2;
    pub const VERIFICATION: i32 = 3;
    pub const FUEL_EXHAUSTED: i32 = 4;
    pub const STUCK: i32 = 5;
    pub const IO: i32 = 7;
}

#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: i32,
    pub kind: &'static str,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl fmt::Display) -> Self {
        CliError { code: exit::INPUT, kind: "input", message: message.to_string() }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        CliError { code: exit::IO, kind: "io", message: format!("{}: {err}", path.display()) }
    }

    pub fn to_json(&self, command: &str) -> Value {
        json!({
            "schema": SCHEMA,
            "command": command,
            "error": { "kind": self.kind, "message": self.message },
            "exit_code": self.code,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

/// Rounds to 12 significant digits; non-finite values become null.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let rounded: f64 = format!("{:.*e}", SIG_DIGITS - 1, x).parse().expect("formatted float");
    json!(if rounded == 0.0 { 0.0 } else { rounded })
}

/// Hash of everything a run depends on.
#[derive(Default)]
pub struct Digest256(Sha256);

impl Digest256 {
    pub fn add(&mut self, label: &str, bytes: &[u8]) {
        self.0.update((label.len() as u64).to_le_bytes());
        self.0.update(label.as_bytes());
        self.0.update((bytes.len() as u64).to_le_bytes());
        self.0.update(bytes);
    }

    pub fn hex(self) -> String {
        hex::encode(self.0.finalize())
    }
}

/// Outcome of one command: the report body and the exit code.
pub struct RunReport {
    pub command: &'static str,
    pub digest: String,
    pub metrics: Map<String, Value>,
    pub results: Map<String, Value>,
    pub artifacts: Vec<String>,
    pub exit_code: i32,
}

impl RunReport {
    pub fn new(command: &'static str, digest: Digest256) -> Self {
        RunReport {
            command,
            digest: digest.hex(),
            metrics: Map::new(),
            results: Map::new(),
            artifacts: Vec::new(),
            exit_code: exit::OK,
        }
    }

    pub fn metric(&mut self, key: &str, v: Value) {
        self.metrics.insert(key.to_string(), v);
    }

    pub fn result(&mut self, key: &str, v: Value) {
        self.results.insert(key.to_string(), v);
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema": SCHEMA,
            "command": self.command,
            "inputs_digest": self.digest,
            "metrics": self.metrics,
            "results": self.results,
            "artifacts": self.artifacts,
            "exit_code": self.exit_code,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(num(std::f64::consts::FRAC_1_SQRT_2).to_string(), "0.707106781187");
        assert_eq!(num(1.0).to_string(), "1.0");
        assert_eq!(num(-1e-20).to_string(), "-1e-20");
        assert_eq!(num(-0.0).to_string(), "0.0");
        assert_eq!(num(f64::NAN), Value::Null);
    }

    #[test]
    fn digest_separates_fields() {
        let mut a = Digest256::default();
        a.add("x", b"ab");
        a.add("y", b"c");
        let mut b = Digest256::default();
        b.add("x", b"a");
        b.add("y", b"bc");
        assert_ne!(a.hex(), b.hex());
    }
}
