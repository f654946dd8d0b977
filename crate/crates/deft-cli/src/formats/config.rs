//! The optional training config file: `key = value` lines keyed by the long
//! flag names (`omega = 0.2`, `rq-in-loss = false`). `#` comments and blank
//! lines are ignored. Command-line flags override file values; unknown or
//! duplicate keys are errors so typos never silently fall back to defaults.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{CliError, CliResult};
use crate::io::read_input;

/// Parsed config entries, consumed key by key.
#[derive(Debug, Default)]
pub struct ConfigMap {
    what: String,
    entries: BTreeMap<String, (String, usize)>,
}

impl ConfigMap {
    /// Parse a config file (syntax only; keys are checked by the consumer).
    pub fn read(path: &Path) -> CliResult<ConfigMap> {
        let content = read_input(path)?;
        let what = path.display().to_string();
        let mut entries = BTreeMap::new();
        for (index, line) in content.lines().enumerate() {
            let lineno = index + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::validation(format!(
                    "{what} line {lineno}: expected key = value, got {line:?}"
                ))
            })?;
            let key = key.trim().to_string();
            if key.is_empty() {
                return Err(CliError::validation(format!(
                    "{what} line {lineno}: empty key"
                )));
            }
            if entries
                .insert(key.clone(), (value.trim().to_string(), lineno))
                .is_some()
            {
                return Err(CliError::validation(format!(
                    "{what} line {lineno}: duplicate key {key:?}"
                )));
            }
        }
        Ok(ConfigMap { what, entries })
    }

    /// Remove and return one key's raw value.
    pub fn take(&mut self, key: &str) -> Option<String> {
        self.entries.remove(key).map(|(value, _)| value)
    }

    /// Remove and parse one key's value.
    pub fn take_parsed<T: std::str::FromStr>(&mut self, key: &str) -> CliResult<Option<T>> {
        match self.entries.remove(key) {
            None => Ok(None),
            Some((value, lineno)) => value.parse().map(Some).map_err(|_| {
                CliError::validation(format!(
                    "{} line {lineno}: bad {key} value {value:?}",
                    self.what
                ))
            }),
        }
    }

    /// Fail if any (unknown) keys are left unconsumed.
    pub fn finish(self) -> CliResult<()> {
        if let Some((key, (_, lineno))) = self.entries.into_iter().next() {
            return Err(CliError::validation(format!(
                "{} line {lineno}: unknown key {key:?}",
                self.what
            )));
        }
        Ok(())
    }
}
