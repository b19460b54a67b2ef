//! Byte-stable serialization: sorted keys, 12 significant digits.

use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: &str = "1.0.0";

/// Base directory for relative output paths.
pub const OUT_DIR_ENV: &str = "TOPOPHASE_OUT_DIR";

/// Rounds to 12 significant digits; folds `-0` into `0`.
pub fn round12(x: f64) -> f64 {
    let r: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

/// CSV cell text for a float.
pub fn cell(x: f64) -> String {
    round12(x).to_string()
}

/// JSON number; non-finite values are an internal error, never silently null.
pub fn num(x: f64) -> CliResult<Value> {
    if !x.is_finite() {
        return Err(CliError::Invariant(format!("cli: non-finite value {x} in report")));
    }
    Ok(json!(round12(x)))
}

pub fn opt(x: Option<f64>) -> CliResult<Value> {
    x.map_or(Ok(Value::Null), num)
}

pub fn tool() -> Value {
    json!({
        "name": "topophase",
        "version": env!("CARGO_PKG_VERSION"),
        "schema_version": SCHEMA_VERSION,
    })
}

pub fn to_canonical_string(value: &Value) -> String {
    // serde_json's default map is ordered by key, so only the layout is fixed here.
    let mut s = serde_json::to_string_pretty(value).expect("reports contain only finite numbers");
    s.push('\n');
    s
}

/// Resolves an output path against the output-directory environment variable.
pub fn resolve(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() && !dir.is_empty() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

pub fn write(path: &Path, contents: &str) -> CliResult<()> {
    let target = resolve(path);
    if let Some(parent) = target.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
    }
    fs::write(&target, contents).map_err(|e| CliError::io(&target, e))
}

/// `dir/stem.json` next to `path`.
pub fn sibling_json(path: &Path) -> PathBuf {
    path.with_extension("json")
}

pub fn display(path: &Path) -> String {
    path.to_string_lossy().into_owned()
}
