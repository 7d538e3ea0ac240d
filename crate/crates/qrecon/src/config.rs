//! Optional config files whose keys mirror command-line flags.
//!
//! TOML (`.toml`) and JSON (anything else) are accepted. Keys may use `-` or
//! `_`; values are plain scalars, or arrays for list-valued flags.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    path: PathBuf,
    values: BTreeMap<String, Value>,
}

fn normalise(key: &str) -> String {
    key.replace('_', "-")
}

impl ConfigFile {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let is_toml = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("toml"));
        let root: Value = if is_toml {
            let table: toml::Table =
                toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
            serde_json::to_value(table).map_err(|e| Error::Config(e.to_string()))?
        } else {
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        };
        let Value::Object(map) = root else {
            return Err(Error::Config(format!("{}: top level must be a table", path.display())));
        };
        Ok(Self {
            path: path.to_path_buf(),
            values: map.into_iter().map(|(k, v)| (normalise(&k), v)).collect(),
        })
    }

    /// Rejects keys that are not flags of the current command.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        match self.values.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Error::Config(format!("{}: unknown key {k:?}", self.path.display()))),
            None => Ok(()),
        }
    }

    fn bad(&self, key: &str, want: &str) -> Error {
        Error::Config(format!("{}: key {key:?} must be {want}", self.path.display()))
    }

    pub fn get<T: FromValue>(&self, key: &str) -> Result<Option<T>> {
        match self.values.get(key) {
            None => Ok(None),
            Some(v) => T::from_value(v).map(Some).ok_or_else(|| self.bad(key, T::WANT)),
        }
    }
}

pub trait FromValue: Sized {
    const WANT: &'static str;
    fn from_value(v: &Value) -> Option<Self>;
}

impl FromValue for String {
    const WANT: &'static str = "a string";
    fn from_value(v: &Value) -> Option<Self> {
        match v {
            Value::String(s) => Some(s.clone()),
            Value::Number(n) => Some(n.to_string()),
            _ => None,
        }
    }
}

impl FromValue for u64 {
    const WANT: &'static str = "a non-negative integer";
    fn from_value(v: &Value) -> Option<Self> {
        v.as_u64().or_else(|| v.as_str()?.parse().ok())
    }
}

impl FromValue for usize {
    const WANT: &'static str = "a non-negative integer";
    fn from_value(v: &Value) -> Option<Self> {
        u64::from_value(v).and_then(|x| usize::try_from(x).ok())
    }
}

impl FromValue for f64 {
    const WANT: &'static str = "a number";
    fn from_value(v: &Value) -> Option<Self> {
        v.as_f64().or_else(|| v.as_str()?.parse().ok())
    }
}

impl FromValue for bool {
    const WANT: &'static str = "a boolean";
    fn from_value(v: &Value) -> Option<Self> {
        v.as_bool()
    }
}

/// Either an array of integers or a comma-separated string.
impl FromValue for Vec<usize> {
    const WANT: &'static str = "a list of integers";
    fn from_value(v: &Value) -> Option<Self> {
        match v {
            Value::Array(items) => items.iter().map(usize::from_value).collect(),
            Value::String(s) => parse_usize_list(s).ok(),
            _ => None,
        }
    }
}

/// Parses `"128,128"`.
pub fn parse_usize_list(text: &str) -> std::result::Result<Vec<usize>, String> {
    text.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_and_json_agree() {
        let dir = tempfile::tempdir().unwrap();
        let t = dir.path().join("c.toml");
        fs::write(&t, "seed = 7\nhidden = [64, 64]\nlr = 0.01\nchannel = \"Z(0.2)\"\n").unwrap();
        let j = dir.path().join("c.json");
        fs::write(&j, r#"{"seed": 7, "hidden": "64,64", "lr": 0.01, "channel": "Z(0.2)"}"#).unwrap();
        for path in [t, j] {
            let c = ConfigFile::load(&path).unwrap();
            assert_eq!(c.get::<u64>("seed").unwrap(), Some(7));
            assert_eq!(c.get::<Vec<usize>>("hidden").unwrap(), Some(vec![64, 64]));
            assert_eq!(c.get::<f64>("lr").unwrap(), Some(0.01));
            assert_eq!(c.get::<String>("channel").unwrap().as_deref(), Some("Z(0.2)"));
            assert_eq!(c.get::<u64>("epochs").unwrap(), None);
            assert!(c.get::<bool>("seed").is_err());
            assert!(c.check_keys(&["seed", "hidden", "lr", "channel"]).is_ok());
            assert!(c.check_keys(&["seed"]).is_err());
        }
    }

    #[test]
    fn underscores_match_dashes() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.json");
        fs::write(&p, r#"{"test_data": "t.jsonl"}"#).unwrap();
        let c = ConfigFile::load(&p).unwrap();
        assert_eq!(c.get::<String>("test-data").unwrap().as_deref(), Some("t.jsonl"));
    }
}
