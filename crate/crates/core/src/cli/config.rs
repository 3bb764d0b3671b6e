//! Flat `key = value` experiment configuration.
//!
//! One assignment per line, `#` starts a comment, lists are comma-separated.
//! Every command declares its keys with defaults; anything else is rejected.

use std::collections::BTreeMap;
use std::str::FromStr;

use super::UsageError;

/// Key with its default value as written in a config file.
pub(crate) type KeySpec = (&'static str, &'static str);

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentConfig {
    values: BTreeMap<String, String>,
}

/// Parses the text of a config file. Duplicate keys are an error.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, UsageError> {
    let mut out = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| UsageError(format!("line {}: expected key = value, got `{}`", lineno + 1, raw.trim())))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(UsageError(format!("line {}: empty key", lineno + 1)));
        }
        if out.insert(key.to_string(), value.trim().to_string()).is_some() {
            return Err(UsageError(format!("line {}: duplicate key `{key}`", lineno + 1)));
        }
    }
    Ok(out)
}

impl ExperimentConfig {
    /// Resolves `defaults`, then `file`, then `overrides` (later wins).
    /// Keys absent from `defaults` are rejected.
    pub(crate) fn resolve(
        defaults: &[KeySpec],
        file: BTreeMap<String, String>,
        overrides: BTreeMap<String, String>,
    ) -> Result<Self, UsageError> {
        let mut values: BTreeMap<String, String> =
            defaults.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        for (k, v) in file.into_iter().chain(overrides) {
            if !values.contains_key(&k) {
                let known: Vec<&str> = defaults.iter().map(|(k, _)| *k).collect();
                return Err(UsageError(format!("unknown key `{k}` (known: {})", known.join(", "))));
            }
            values.insert(k, v);
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &BTreeMap<String, String> {
        &self.values
    }

    fn raw(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).unwrap_or_else(|| panic!("undeclared key {key}"))
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<T, UsageError> {
        let raw = self.raw(key);
        raw.parse().map_err(|_| UsageError(format!("`{key}`: cannot parse `{raw}`")))
    }

    pub fn list<T: FromStr>(&self, key: &str) -> Result<Vec<T>, UsageError> {
        let raw = self.raw(key);
        if raw.is_empty() {
            return Ok(Vec::new());
        }
        raw.split(',')
            .map(|s| {
                let s = s.trim();
                s.parse().map_err(|_| UsageError(format!("`{key}`: cannot parse list item `{s}`")))
            })
            .collect()
    }
}
