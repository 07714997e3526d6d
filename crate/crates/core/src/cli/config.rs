//! Optional `key = value` config file mirroring the command-line flags.
//! Keys use the long flag names (`min-dur`, `k`, `tau`, ...); flags win.

use std::path::Path;
use std::str::FromStr;

use toml::{Table, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    table: Table,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Format { message, .. } => Error::format(path.display().to_string(), message),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let table: Table = text.parse().map_err(|e: toml::de::Error| Error::format("config", e.message().to_owned()))?;
        if let Some((key, _)) = table.iter().find(|(_, v)| v.is_table() || v.is_array()) {
            return Err(Error::format("config", format!("{key:?} must be a plain value")));
        }
        Ok(Self { table })
    }

    fn raw(&self, key: &str) -> Option<String> {
        self.table.get(key).map(|v| match v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        })
    }

    /// The flag value if given, else the config value, else `default`.
    pub fn resolve<T: FromStr>(&self, key: &str, flag: Option<T>, default: T) -> Result<T> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.raw(key) {
            Some(raw) => raw
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("config key {key:?} has an invalid value {raw:?}"))),
            None => Ok(default),
        }
    }

    pub fn resolve_flag(&self, key: &str, flag: bool) -> Result<bool> {
        if flag {
            return Ok(true);
        }
        self.resolve(key, None, false)
    }

    pub fn resolve_opt<T: FromStr>(&self, key: &str, flag: Option<T>) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        self.raw(key)
            .map(|raw| raw.parse().map_err(|_| Error::InvalidArgument(format!("config key {key:?} has an invalid value {raw:?}"))))
            .transpose()
    }
}
