//! Config files and matrix files.

use std::path::Path;

use qcircuit::linalg::{c, CMatrix};
use qcircuit::rng::RngAlgorithm;

use crate::report::CliError;

/// Settings from `--config`: one `key = value` per line, `#` comments.
#[derive(Debug, Clone, PartialEq)]
pub struct Config {
    pub rng: RngAlgorithm,
    /// Acceptance threshold for reconstruction errors.
    pub tol: f64,
    /// Tolerance for structural tests such as primitivity.
    pub eps: f64,
    pub fuel: u64,
    pub shots: usize,
    pub max_len: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config { rng: RngAlgorithm::ChaCha8, tol: 1e-9, eps: 1e-9, fuel: 10_000, shots: 0, max_len: 10 }
    }
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Config::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: String| CliError::input(format!("config line {}: {m}", i + 1));
            let (key, value) = line.split_once('=').ok_or_else(|| err(format!("expected key = value, found {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |e: &dyn std::fmt::Display| err(format!("bad value for {key}: {e}"));
            match key {
                "rng" => cfg.rng = value.parse().map_err(|e: String| bad(&e))?,
                "tol" => cfg.tol = value.parse().map_err(|e| bad(&e))?,
                "eps" => cfg.eps = value.parse().map_err(|e| bad(&e))?,
                "fuel" => cfg.fuel = value.parse().map_err(|e| bad(&e))?,
                "shots" => cfg.shots = value.parse().map_err(|e| bad(&e))?,
                "max_len" => cfg.max_len = value.parse().map_err(|e| bad(&e))?,
                _ => return Err(err(format!("unknown key {key:?}"))),
            }
        }
        if !(cfg.tol > 0.0 && cfg.eps > 0.0) {
            return Err(CliError::input("tol and eps must be positive"));
        }
        Ok(cfg)
    }
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// `dim N` (or a bare `N`), then `N` rows of `N` whitespace-separated
/// `re im` pairs. `#` starts a comment.
pub fn parse_matrix(text: &str) -> Result<CMatrix, CliError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (hl, header) = lines.next().ok_or_else(|| CliError::input("matrix file is empty"))?;
    let dim_text = header.strip_prefix("dim").unwrap_or(header).trim();
    let dim: usize = dim_text
        .parse()
        .ok()
        .filter(|&d| d > 0)
        .ok_or_else(|| CliError::input(format!("line {hl}: expected `dim N`, found {header:?}")))?;
    let mut rows = Vec::with_capacity(dim);
    for (ln, line) in lines {
        let xs = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|e| CliError::input(format!("line {ln}: bad number {t:?}: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        if xs.len() != 2 * dim {
            return Err(CliError::input(format!("line {ln}: expected {dim} `re im` pairs, found {} numbers", xs.len())));
        }
        rows.push(xs.chunks(2).map(|p| c(p[0], p[1])).collect::<Vec<_>>());
    }
    if rows.len() != dim {
        return Err(CliError::input(format!("expected {dim} rows, found {}", rows.len())));
    }
    Ok(CMatrix::from_rows(&rows))
}
