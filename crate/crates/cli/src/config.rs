//! `key = value` run files with optional `[section]` headers.
//!
//! Keys before the first header belong to every section. `#` and `;` start
//! comment lines. Values are taken verbatim after trimming; lists are
//! comma-separated.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::CliError;

#[derive(Debug, Default)]
pub struct RunFile {
    /// Directory of the file; relative paths in values resolve against it.
    pub base: PathBuf,
    sections: BTreeMap<String, BTreeMap<String, (usize, String)>>,
}

impl RunFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut rf = Self::parse(&text).map_err(|m| CliError::Config(format!("{}: {m}", path.display())))?;
        rf.base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(rf)
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut rf = RunFile::default();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| format!("line {}: unterminated section header", i + 1))?;
                section = name.trim().to_string();
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected `key = value`", i + 1))?;
            let key = k.trim().to_string();
            if key.is_empty() {
                return Err(format!("line {}: empty key", i + 1));
            }
            let entries = rf.sections.entry(section.clone()).or_default();
            if entries.insert(key.clone(), (i + 1, v.trim().to_string())).is_some() {
                return Err(format!("line {}: duplicate key `{key}`", i + 1));
            }
        }
        Ok(rf)
    }

    /// Rejects keys that the section does not understand.
    pub fn check_keys(&self, section: &str, allowed: &[&str]) -> Result<(), CliError> {
        for s in ["", section] {
            if let Some(entries) = self.sections.get(s) {
                for (k, (line, _)) in entries {
                    if !allowed.contains(&k.as_str()) {
                        return Err(CliError::Config(format!("config line {line}: unknown key `{k}`")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections
            .get(section)
            .and_then(|m| m.get(key))
            .or_else(|| self.sections.get("").and_then(|m| m.get(key)))
            .map(|(_, v)| v.as_str())
    }

    pub fn path(&self, section: &str, key: &str) -> Option<PathBuf> {
        self.get(section, key).map(|v| self.base.join(v))
    }

    pub fn paths(&self, section: &str, key: &str) -> Vec<PathBuf> {
        self.get(section, key)
            .map(|v| {
                v.split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| self.base.join(s))
                    .collect()
            })
            .unwrap_or_default()
    }

    pub fn parsed<T: std::str::FromStr>(&self, section: &str, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        match self.get(section, key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|e| CliError::Config(format!("config key `{key}`: {e}"))),
        }
    }
}
