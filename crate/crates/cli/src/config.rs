//! `key = value` run configuration files.
//!
//! Keys are the long flag names without the leading dashes (`trials`,
//! `delete-ratio`, ...); underscores are accepted in place of dashes. Blank
//! lines and lines starting with `#` are ignored. Flags given on the command
//! line win over file values.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::Failure;

pub const KEYS: &[&str] = &[
    "dataset",
    "format",
    "aggregation",
    "index",
    "epsilon",
    "protocol",
    "train-fraction",
    "delete-ratio",
    "trials",
    "seed",
    "drift-iterations",
    "symmetrization",
    "temporal-mode",
    "compare-original",
    "auc-samples",
    "precision-l",
    "top-k",
    "min-iterations",
    "max-iterations",
    "out-dir",
    "output",
    "workers",
];

#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            Failure::Usage(m) => Failure::Usage(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, Failure> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Failure::Usage(format!(
                    "line {}: expected key = value",
                    i + 1
                )));
            };
            let key = key.trim().replace('_', "-");
            if !KEYS.contains(&key.as_str()) {
                return Err(Failure::Usage(format!(
                    "line {}: unknown key `{key}`",
                    i + 1
                )));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        debug_assert!(KEYS.contains(&key), "{key}");
        self.values.get(key).map(String::as_str)
    }

    /// The flag value if given, otherwise the parsed file value.
    pub fn pick<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, Failure>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.raw(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| Failure::Usage(format!("config key `{key}`: {e}")))
            })
            .transpose()
    }

    /// Like [`pick`](Self::pick) for a flag that is still a raw string.
    pub fn choice<T>(&self, flag: Option<&str>, key: &str) -> Result<Option<T>, Failure>
    where
        T: FromStr,
        T::Err: Display,
    {
        match flag {
            Some(v) => v
                .parse::<T>()
                .map(Some)
                .map_err(|e| Failure::Usage(e.to_string())),
            None => self.pick(None, key),
        }
    }
}
