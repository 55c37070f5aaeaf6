//! Data files, CSV/JSON encoding and the run manifest.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};
use tourney_core::Rational;

use crate::config::Settings;
use crate::error::{CliError, Result};

/// One file produced by a command.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

impl Artifact {
    pub fn new(name: impl Into<String>, contents: impl Into<String>) -> Self {
        Self { name: name.into(), contents: contents.into() }
    }
}

/// Comma-separated table with a header row.
#[derive(Debug, Default)]
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new<S: AsRef<str>>(header: impl IntoIterator<Item = S>) -> Self {
        let mut csv = Csv::default();
        csv.row(header);
        csv
    }

    pub fn row<S: AsRef<str>>(&mut self, cells: impl IntoIterator<Item = S>) {
        let mut first = true;
        for cell in cells {
            if !first {
                self.text.push(',');
            }
            self.text.push_str(cell.as_ref());
            first = false;
        }
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

/// Columns named `prefix_0, prefix_1, ...`.
pub fn indexed(prefix: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    (0..n).map(move |x| format!("{prefix}_{x}"))
}

/// Shortest representation that parses back to the same `f64`.
pub fn float(v: f64) -> String {
    v.to_string()
}

/// `"num/den"`, always with an explicit denominator.
pub fn fraction(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// `{"num": .., "den": ..}` with integer members where they fit in an `i64`,
/// decimal strings otherwise.
pub fn fraction_pair(r: &Rational) -> Value {
    let int = |b: &BigInt| match b.to_i64() {
        Some(v) => json!(v),
        None => json!(b.to_string()),
    };
    json!({ "num": int(r.numer()), "den": int(r.denom()) })
}

pub fn to_json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

/// Config echo, seed and version for a run.
pub fn manifest(command: &str, seed: u64, config: &Settings, files: &[&str]) -> String {
    to_json_text(&json!({
        "tool": "tourney",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "seed": seed,
        "config": config.to_json(),
        "files": files,
    }))
}

/// Writes artifacts into a directory, removing everything it created if any
/// write fails.
pub fn write_all(dir: &Path, artifacts: &[Artifact]) -> Result<Vec<PathBuf>> {
    let created_dir = !dir.exists();
    let err = |path: &Path, source: io::Error| CliError::Output { path: path.to_path_buf(), source };
    fs::create_dir_all(dir).map_err(|e| err(dir, e))?;
    let mut written = Vec::new();
    for a in artifacts {
        let path = dir.join(&a.name);
        if let Err(e) = fs::write(&path, &a.contents) {
            // The failed file may exist half-written.
            written.push(path.clone());
            rollback(dir, created_dir, &written);
            return Err(err(&path, e));
        }
        written.push(path);
    }
    Ok(written)
}

fn rollback(dir: &Path, created_dir: bool, written: &[PathBuf]) {
    for p in written {
        let _ = fs::remove_file(p);
    }
    if created_dir {
        let _ = fs::remove_dir(dir);
    }
}
