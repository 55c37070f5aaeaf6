//! Flat `key = value` experiment configuration.
//!
//! A config file holds one `key = value` pair per line; blank lines and
//! lines starting with `#` are ignored. A run manifest written by a previous
//! invocation is accepted in place of a config file. Command-line flags
//! override either.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde_json::Value;
use tourney_core::scalar::parse_rational;
use tourney_core::{FloatLottery, Lottery, RationalLottery, ReinforcementRule, Schedule, Tournament};

use crate::error::{CliError, Result};

/// Every key a config file may contain.
pub const KEYS: &[&str] = &[
    "tournament",
    "rule",
    "initial",
    "horizon",
    "seed",
    "n_seeds",
    "schedule",
    "exact_fast",
    "format",
    "out",
    "limit",
    "sampling",
    "steps",
    "p0",
    "s_end",
    "step",
    "sample_every",
];

/// Resolved string values, ordered by key.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse_flat(text: &str) -> Result<Self> {
        let mut out = Settings::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::config(format!("config line {}: expected key = value", i + 1)));
            };
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(CliError::config(format!("config line {}: unknown key {key:?}", i + 1)));
            }
            out.set(key, value.trim());
        }
        Ok(out)
    }

    /// The `config` object of a run manifest; `command` must match.
    pub fn from_manifest(manifest: &Value, command: &str) -> Result<Self> {
        let recorded = manifest.get("command").and_then(Value::as_str);
        if recorded != Some(command) {
            return Err(CliError::config(format!(
                "manifest was written by {:?}, not {command:?}",
                recorded.unwrap_or("?")
            )));
        }
        let Some(obj) = manifest.get("config").and_then(Value::as_object) else {
            return Err(CliError::config("manifest has no config object"));
        };
        let mut out = Settings::new();
        for (key, value) in obj {
            if !KEYS.contains(&key.as_str()) {
                return Err(CliError::config(format!("manifest: unknown key {key:?}")));
            }
            let Some(value) = value.as_str() else {
                return Err(CliError::config(format!("manifest: value of {key:?} is not a string")));
            };
            out.set(key, value);
        }
        Ok(out)
    }

    /// Reads a flat config file, or a manifest if the file is JSON.
    pub fn load(path: &Path, command: &str) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Input { path: path.to_path_buf(), message: e.to_string() })?;
        if text.trim_start().starts_with('{') {
            let manifest: Value = serde_json::from_str(&text)
                .map_err(|e| CliError::Input { path: path.to_path_buf(), message: e.to_string() })?;
            Self::from_manifest(&manifest, command)
        } else {
            Self::parse_flat(&text)
        }
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.values.insert(key.to_string(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Entries of `other` replace ours.
    pub fn merge(&mut self, other: Settings) {
        self.values.extend(other.values);
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn to_json(&self) -> Value {
        Value::Object(self.values.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect())
    }

    pub fn to_flat(&self) -> String {
        self.values.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }
}

/// Reads typed values out of [`Settings`] and records what was used.
///
/// The record, with defaults filled in, becomes the config echo of the run
/// manifest.
pub struct Resolver<'a> {
    settings: &'a Settings,
    used: Settings,
}

impl<'a> Resolver<'a> {
    pub fn new(settings: &'a Settings) -> Self {
        Self { settings, used: Settings::new() }
    }

    pub fn raw(&mut self, key: &str, default: Option<&str>) -> Result<String> {
        let value = match (self.settings.get(key), default) {
            (Some(v), _) => v.to_string(),
            (None, Some(d)) => d.to_string(),
            (None, None) => return Err(CliError::config(format!("missing required setting {key:?}"))),
        };
        self.used.set(key, value.clone());
        Ok(value)
    }

    pub fn parse<T>(&mut self, key: &str, default: &str) -> Result<T>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        let raw = self.raw(key, Some(default))?;
        raw.parse().map_err(|e| CliError::config(format!("{key} = {raw:?}: {e}")))
    }

    pub fn tournament(&mut self) -> Result<Tournament> {
        let raw = self.raw("tournament", None)?;
        TournamentSource::parse(&raw)?.load()
    }

    pub fn rule(&mut self) -> Result<ReinforcementRule> {
        self.parse("rule", "two")
    }

    pub fn counts(&mut self, key: &str, n: usize) -> Result<Vec<u64>> {
        let ones = vec!["1"; n].join(",");
        let raw = self.raw(key, Some(&ones))?;
        split_list(&raw)
            .map(|p| p.parse::<u64>().map_err(|_| CliError::config(format!("{key}: bad count {p:?}"))))
            .collect()
    }

    pub fn schedule(&mut self) -> Result<Schedule> {
        self.parse("schedule", "geometric")
    }

    pub fn rational_lottery(&mut self, key: &str, n: usize) -> Result<RationalLottery> {
        let raw = self.raw(key, Some("uniform"))?;
        if raw == "uniform" {
            return Ok(Lottery::uniform(n));
        }
        let probs = split_list(&raw)
            .map(|p| parse_rational(p).ok_or_else(|| CliError::config(format!("{key}: bad fraction {p:?}"))))
            .collect::<Result<Vec<_>>>()?;
        check_arity(key, n, probs.len())?;
        Ok(Lottery::new(probs)?)
    }

    pub fn float_lottery(&mut self, key: &str, n: usize) -> Result<FloatLottery> {
        let raw = self.raw(key, Some("uniform"))?;
        if raw == "uniform" {
            return Ok(Lottery::uniform(n));
        }
        let probs = split_list(&raw)
            .map(|p| p.parse::<f64>().map_err(|_| CliError::config(format!("{key}: bad number {p:?}"))))
            .collect::<Result<Vec<_>>>()?;
        check_arity(key, n, probs.len())?;
        Ok(Lottery::new(probs)?)
    }

    pub fn into_used(self) -> Settings {
        self.used
    }
}

fn split_list(raw: &str) -> impl Iterator<Item = &str> {
    raw.split(',').map(str::trim)
}

fn check_arity(key: &str, n: usize, got: usize) -> Result<()> {
    if n == got {
        Ok(())
    } else {
        Err(CliError::config(format!("{key}: expected {n} entries, got {got}")))
    }
}

/// Output encoding for data files.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err("expected csv or json".into()),
        }
    }
}

/// Where a tournament comes from: a text file or a named generator.
///
/// Generators are written `gen:NAME[:ARGS]`:
/// `gen:three-cycle`, `gen:cyclone:N`, `gen:transitive:N`,
/// `gen:random:N:SEED`, and `gen:condorcet:INNER`, which puts a new
/// alternative 0 above the tournament built by `INNER`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TournamentSource {
    File(PathBuf),
    Generator(String),
}

impl TournamentSource {
    pub fn parse(raw: &str) -> Result<Self> {
        match raw.strip_prefix("gen:") {
            Some(spec) => Ok(TournamentSource::Generator(spec.to_string())),
            None if raw.is_empty() => Err(CliError::config("empty tournament source")),
            None => Ok(TournamentSource::File(PathBuf::from(raw))),
        }
    }

    pub fn load(&self) -> Result<Tournament> {
        match self {
            TournamentSource::File(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::Input { path: path.clone(), message: e.to_string() })?;
                Tournament::from_text(&text)
                    .map_err(|e| CliError::Input { path: path.clone(), message: e.to_string() })
            }
            TournamentSource::Generator(spec) => generate(spec),
        }
    }
}

fn generate(spec: &str) -> Result<Tournament> {
    let bad = || CliError::config(format!("unknown tournament generator {spec:?}"));
    let num = |s: &str| s.parse::<u64>().map_err(|_| bad());
    let (name, args) = spec.split_once(':').unwrap_or((spec, ""));
    let t = match name {
        "three-cycle" if args.is_empty() => Tournament::three_cycle(),
        "cyclone" => Tournament::cyclone(num(args)? as usize)?,
        "transitive" => Tournament::transitive(num(args)? as usize)?,
        "random" => {
            let (n, seed) = args.split_once(':').ok_or_else(bad)?;
            Tournament::random(num(n)? as usize, num(seed)?)?
        }
        "condorcet" => Tournament::with_condorcet_winner(&generate(args)?),
        _ => return Err(bad()),
    };
    Ok(t)
}
