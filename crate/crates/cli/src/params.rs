//! Parameter resolution: command-line flag, then config file, then default.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::error::{CliError, CliResult};

/// Parses a flat `key = value` file. Blank lines and lines starting with `#`
/// are ignored; keys may use `-` or `_`.
pub fn parse_config(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key = value", i + 1)))?;
        let key = key.trim().replace('_', "-");
        if key.is_empty() {
            return Err(CliError::Usage(format!("config line {}: empty key", i + 1)));
        }
        if out.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(CliError::Usage(format!("config line {}: duplicate key {key}", i + 1)));
        }
    }
    Ok(out)
}

/// Resolved run parameters, recording every value used.
#[derive(Debug, Default)]
pub struct Params {
    file: BTreeMap<String, String>,
    used: BTreeMap<String, String>,
}

impl Params {
    pub fn from_file(path: Option<&Path>) -> CliResult<Self> {
        let file = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p.display(), e))?;
                parse_config(&text)?
            }
            None => BTreeMap::new(),
        };
        Ok(Self { file, used: BTreeMap::new() })
    }

    fn take(&mut self, key: &str) -> Option<String> {
        self.file.remove(key)
    }

    fn record(&mut self, key: &str, value: String) {
        self.used.insert(key.to_string(), value);
    }

    pub fn get<T>(&mut self, key: &str, flag: Option<T>, default: T) -> CliResult<T>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let from_file = self.take(key);
        let value = match (flag, from_file) {
            (Some(v), _) => v,
            (None, Some(s)) => s.parse().map_err(|e| CliError::Usage(format!("config key {key}: {e}")))?,
            (None, None) => default,
        };
        self.record(key, value.to_string());
        Ok(value)
    }

    pub fn get_opt<T>(&mut self, key: &str, flag: Option<T>) -> CliResult<Option<T>>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let from_file = self.take(key);
        let value = match (flag, from_file) {
            (Some(v), _) => Some(v),
            (None, Some(s)) => Some(s.parse().map_err(|e| CliError::Usage(format!("config key {key}: {e}")))?),
            (None, None) => None,
        };
        if let Some(v) = &value {
            self.record(key, v.to_string());
        }
        Ok(value)
    }

    /// A boolean switch: set on the command line, or `true`/`false` in the file.
    pub fn switch(&mut self, key: &str, flag: bool) -> CliResult<bool> {
        let from_file = self.take(key);
        let value = if flag {
            true
        } else if let Some(s) = from_file {
            s.parse().map_err(|e| CliError::Usage(format!("config key {key}: {e}")))?
        } else {
            false
        };
        self.record(key, value.to_string());
        Ok(value)
    }

    /// A comma-separated list of numbers.
    pub fn list<T>(&mut self, key: &str, flag: Option<String>, default: &str) -> CliResult<Vec<T>>
    where
        T: FromStr,
        T::Err: Display,
    {
        let raw = self.get(key, flag, default.to_string())?;
        parse_list(key, &raw)
    }

    /// Fails on config keys that no parameter consumed.
    pub fn finish(&self) -> CliResult<()> {
        match self.file.keys().next() {
            Some(k) => Err(CliError::Usage(format!("unknown config key {k}"))),
            None => Ok(()),
        }
    }

    pub fn used(&self) -> &BTreeMap<String, String> {
        &self.used
    }
}

pub fn parse_list<T>(key: &str, raw: &str) -> CliResult<Vec<T>>
where
    T: FromStr,
    T::Err: Display,
{
    raw.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|e| CliError::Usage(format!("{key}: cannot parse {s:?}: {e}"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_parsing() {
        let c = parse_config("# comment\nsamples = 100\n\nu_max=2.5\n").unwrap();
        assert_eq!(c["samples"], "100");
        assert_eq!(c["u-max"], "2.5");
        assert!(parse_config("a = 1\na = 2").is_err());
        assert!(parse_config("novalue").is_err());
    }

    #[test]
    fn precedence() {
        let mut p = Params { file: parse_config("samples = 100\nseed = 3").unwrap(), used: BTreeMap::new() };
        assert_eq!(p.get("samples", Some(7usize), 1).unwrap(), 7);
        assert_eq!(p.get("seed", None, 0u64).unwrap(), 3);
        assert_eq!(p.get("bins", None, 30usize).unwrap(), 30);
        assert_eq!(p.used()["bins"], "30");
        p.finish().unwrap();
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let p = Params { file: parse_config("typo = 1").unwrap(), used: BTreeMap::new() };
        assert!(p.finish().is_err());
    }

    #[test]
    fn lists() {
        assert_eq!(parse_list::<f64>("r", "0.5, 1,2").unwrap(), vec![0.5, 1.0, 2.0]);
        assert!(parse_list::<f64>("r", "").unwrap().is_empty());
        assert!(parse_list::<f64>("r", "a").is_err());
    }
}
