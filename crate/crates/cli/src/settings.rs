//! Parameter resolution: flag, then config file, then default. Every
//! resolved value is recorded for the manifest.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::CliError;

pub struct Settings {
    file: BTreeMap<String, Value>,
    used: RefCell<BTreeSet<String>>,
    resolved: RefCell<BTreeMap<String, Value>>,
}

impl Settings {
    pub fn load(path: Option<&Path>, command: &str) -> Result<Self, CliError> {
        let mut file = BTreeMap::new();
        if let Some(p) = path {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", p.display())))?;
            let value: Value =
                serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("config {}: {e}", p.display())))?;
            let Value::Object(map) = value else {
                return Err(CliError::Usage("config must be a JSON object".into()));
            };
            file.extend(map);
        }
        if let Some(c) = file.remove("command") {
            if c.as_str() != Some(command) {
                return Err(CliError::Usage(format!("config is for command {c}, not {command}")));
            }
        }
        Ok(Self { file, used: RefCell::new(BTreeSet::new()), resolved: RefCell::new(BTreeMap::new()) })
    }

    fn record<T: Serialize>(&self, key: &str, value: &T) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.resolved.borrow_mut().insert(key.to_string(), v);
    }

    /// Flag or config value, if any.
    pub fn get<T: Serialize + DeserializeOwned>(&self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError> {
        let from_file = match self.file.get(key) {
            Some(raw) => {
                self.used.borrow_mut().insert(key.to_string());
                Some(raw.clone())
            }
            None => None,
        };
        let value = match (flag, from_file) {
            (Some(v), _) => Some(v),
            (None, Some(raw)) => Some(
                serde_json::from_value(raw).map_err(|e| CliError::Usage(format!("config key {key}: {e}")))?,
            ),
            (None, None) => None,
        };
        if let Some(v) = &value {
            self.record(key, v);
        }
        Ok(value)
    }

    pub fn or<T: Serialize + DeserializeOwned>(&self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError> {
        match self.get(key, flag)? {
            Some(v) => Ok(v),
            None => {
                self.record(key, &default);
                Ok(default)
            }
        }
    }

    /// A strictly positive real.
    pub fn positive(&self, key: &str, flag: Option<f64>, default: f64) -> Result<f64, CliError> {
        let v = self.or(key, flag, default)?;
        if !(v > 0.0 && v.is_finite()) {
            return Err(CliError::Usage(format!("{key} must be positive, got {v}")));
        }
        Ok(v)
    }

    /// Reject config keys no step asked for.
    pub fn finish(&self) -> Result<(), CliError> {
        let used = self.used.borrow();
        let unknown: Vec<&String> = self.file.keys().filter(|k| !used.contains(*k)).collect();
        if !unknown.is_empty() {
            return Err(CliError::Usage(format!("unknown config keys: {unknown:?}")));
        }
        Ok(())
    }

    pub fn resolved(&self) -> BTreeMap<String, Value> {
        self.resolved.borrow().clone()
    }
}

/// `"a,b,c"` as reals.
pub fn parse_list(key: &str, text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| CliError::Usage(format!("{key}: cannot parse {p:?}: {e}"))))
        .collect()
}
