//! Optional JSON config file. Top-level keys are global settings; a
//! nested object named after a subcommand holds that command's settings.
//! Precedence everywhere: command-line flag > config file > built-in
//! default.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::de::DeserializeOwned;
use serde_json::Value;

pub struct FileConfig {
    root: Value,
}

impl FileConfig {
    /// `None` behaves as an empty config.
    pub fn load(path: Option<&Path>) -> Result<FileConfig> {
        let root = match path {
            None => Value::Object(Default::default()),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading config file {}", p.display()))?;
                let v: Value = serde_json::from_str(&text)
                    .with_context(|| format!("parsing config file {}", p.display()))?;
                if !v.is_object() {
                    bail!("config file {} must contain a JSON object", p.display());
                }
                v
            }
        };
        Ok(FileConfig { root })
    }

    /// Top-level key only.
    pub fn global<T: DeserializeOwned>(&self, key: &str) -> Result<Option<T>> {
        self.decode(self.root.get(key), key)
    }

    /// Key inside the command's section, falling back to a top-level key
    /// of the same name.
    pub fn get<T: DeserializeOwned>(&self, section: &str, key: &str) -> Result<Option<T>> {
        let v = self
            .root
            .get(section)
            .and_then(|s| s.get(key))
            .or_else(|| self.root.get(key));
        self.decode(v, key)
    }

    fn decode<T: DeserializeOwned>(&self, v: Option<&Value>, key: &str) -> Result<Option<T>> {
        match v {
            None => Ok(None),
            Some(v) => serde_json::from_value(v.clone())
                .map(Some)
                .with_context(|| format!("config key {key:?} has the wrong type")),
        }
    }
}

/// flag > file > default.
pub fn resolve<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}
