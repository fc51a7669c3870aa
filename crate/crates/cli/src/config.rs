//! Flat `key=value` configuration with command-line overrides.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use crate::error::CliError;

/// Raw configuration: file entries then `--set` overrides, last wins.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    pub entries: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut cfg = Self::default();
        for (k, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            cfg.set(line).map_err(|e| CliError::Config(format!("line {}: {e}", k + 1)))?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Applies one `key=value` assignment.
    pub fn set(&mut self, assignment: &str) -> Result<(), CliError> {
        let (k, v) = assignment
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("expected key=value, got `{assignment}`")))?;
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return Err(CliError::Config(format!("empty key in `{assignment}`")));
        }
        self.entries.insert(k.to_string(), v.to_string());
        Ok(())
    }
}

/// Typed reader that records which keys were consumed.
pub struct Params<'a> {
    raw: &'a RawConfig,
    prefix: String,
    used: BTreeSet<String>,
    errors: Vec<String>,
}

impl<'a> Params<'a> {
    pub fn new(raw: &'a RawConfig) -> Self {
        Self { raw, prefix: String::new(), used: BTreeSet::new(), errors: Vec::new() }
    }

    /// Subsequent lookups read `prefix.key`.
    pub fn scoped(&mut self, prefix: &str) -> &mut Self {
        self.prefix = if prefix.is_empty() { String::new() } else { format!("{prefix}.") };
        self
    }

    fn lookup(&mut self, key: &str) -> Option<(String, &'a str)> {
        let full = format!("{}{key}", self.prefix);
        self.used.insert(full.clone());
        let raw = self.raw;
        raw.entries.get(&full).map(|v| (full, v.as_str()))
    }

    fn fail(&mut self, key: &str, msg: String) {
        self.errors.push(format!("{key}: {msg}"));
    }

    pub fn f64(&mut self, key: &str, default: f64) -> f64 {
        match self.lookup(key) {
            None => default,
            Some((full, v)) => match v.parse::<f64>() {
                Ok(x) if x.is_finite() => x,
                _ => {
                    self.fail(&full, format!("expected a finite number, got `{v}`"));
                    default
                }
            },
        }
    }

    pub fn u64(&mut self, key: &str, default: u64) -> u64 {
        match self.lookup(key) {
            None => default,
            Some((full, v)) => v.parse::<u64>().unwrap_or_else(|_| {
                self.fail(&full, format!("expected a nonnegative integer, got `{v}`"));
                default
            }),
        }
    }

    pub fn usize(&mut self, key: &str, default: usize) -> usize {
        self.u64(key, default as u64) as usize
    }

    pub fn f64_list(&mut self, key: &str, default: &[f64]) -> Vec<f64> {
        match self.lookup(key) {
            None => default.to_vec(),
            Some((full, v)) => {
                let parsed: Result<Vec<f64>, _> = v.split(',').map(|t| t.trim().parse::<f64>()).collect();
                match parsed {
                    Ok(xs) if !xs.is_empty() && xs.iter().all(|x| x.is_finite()) => xs,
                    _ => {
                        self.fail(&full, format!("expected a comma-separated list of numbers, got `{v}`"));
                        default.to_vec()
                    }
                }
            }
        }
    }

    pub fn u64_list(&mut self, key: &str, default: &[u64]) -> Vec<u64> {
        match self.lookup(key) {
            None => default.to_vec(),
            Some((full, v)) => {
                let parsed: Result<Vec<u64>, _> = v.split(',').map(|t| t.trim().parse::<u64>()).collect();
                parsed.unwrap_or_else(|_| {
                    self.fail(&full, format!("expected a comma-separated list of integers, got `{v}`"));
                    default.to_vec()
                })
            }
        }
    }

    pub fn string(&mut self, key: &str, default: &str) -> String {
        self.lookup(key).map(|(_, v)| v.to_string()).unwrap_or_else(|| default.to_string())
    }

    /// Records a violated precondition.
    pub fn require(&mut self, ok: bool, key: &str, msg: &str) {
        if !ok {
            let full = format!("{}{key}", self.prefix);
            self.fail(&full, msg.to_string());
        }
    }

    /// Fails on parse errors, violated preconditions, or keys never read.
    pub fn finish(self) -> Result<(), CliError> {
        let mut errors = self.errors;
        for k in self.raw.entries.keys() {
            if !self.used.contains(k) {
                errors.push(format!("{k}: unknown key"));
            }
        }
        if errors.is_empty() {
            Ok(())
        } else {
            Err(CliError::Config(errors.join("; ")))
        }
    }
}
