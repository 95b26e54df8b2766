//! Flat `key = value` run configuration.
//!
//! Grammar, one entry per line:
//!
//! ```text
//! line    := blank | comment | entry
//! comment := '#' anything
//! entry   := ident '=' value [comment]
//! ident   := [A-Za-z_][A-Za-z0-9_]*
//! value   := item (',' item)*
//! item    := decimal | word
//! ```
//!
//! Keys may appear once. Values are kept as text and parsed by the typed
//! getters; later [`Config::set`] calls (command-line overrides) replace
//! file entries.

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

fn valid_ident(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn valid_item(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || "+-._".contains(c))
}

fn bad(msg: String) -> Error {
    Error::InvalidConfig(msg)
}

impl Config {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Config::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| bad(format!("line {}: expected `key = value`", i + 1)))?;
            let key = key.trim();
            if !valid_ident(key) {
                return Err(bad(format!("line {}: invalid key `{key}`", i + 1)));
            }
            if cfg.entries.contains_key(key) {
                return Err(bad(format!("line {}: duplicate key `{key}`", i + 1)));
            }
            cfg.insert(key, value).map_err(|e| match e {
                Error::InvalidConfig(m) => bad(format!("line {}: {m}", i + 1)),
                other => other,
            })?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    fn insert(&mut self, key: &str, value: &str) -> Result<()> {
        let items: Vec<&str> = value.split(',').map(str::trim).collect();
        if let Some(item) = items.iter().find(|s| !valid_item(s)) {
            return Err(bad(format!("invalid value `{item}` for `{key}`")));
        }
        self.entries.insert(key.to_string(), items.join(","));
        Ok(())
    }

    /// Sets or replaces an entry.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !valid_ident(key) {
            return Err(bad(format!("invalid key `{key}`")));
        }
        self.insert(key, value)
    }

    /// Parses `key=value` and applies it with [`Config::set`].
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair.split_once('=').ok_or_else(|| bad(format!("override `{pair}` is not `key=value`")))?;
        self.set(k.trim(), v)
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>> {
        self.str(key).map(|s| parse_f64(key, s)).transpose()
    }

    pub fn usize(&self, key: &str) -> Result<Option<usize>> {
        self.str(key)
            .map(|s| s.parse().map_err(|_| bad(format!("`{key}` expects a non-negative integer, got `{s}`"))))
            .transpose()
    }

    pub fn bool(&self, key: &str) -> Result<Option<bool>> {
        self.str(key)
            .map(|s| match s {
                "true" | "on" | "yes" | "1" => Ok(true),
                "false" | "off" | "no" | "0" => Ok(false),
                _ => Err(bad(format!("`{key}` expects a boolean, got `{s}`"))),
            })
            .transpose()
    }

    pub fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.str(key).map(|s| s.split(',').map(|item| parse_f64(key, item)).collect()).transpose()
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64> {
        Ok(self.f64(key)?.unwrap_or(default))
    }

    pub fn usize_or(&self, key: &str, default: usize) -> Result<usize> {
        Ok(self.usize(key)?.unwrap_or(default))
    }

    /// Rejects keys outside `allowed`.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        match self.keys().find(|k| !allowed.contains(k)) {
            Some(k) => Err(bad(format!("unknown key `{k}`"))),
            None => Ok(()),
        }
    }
}

fn parse_f64(key: &str, s: &str) -> Result<f64> {
    s.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| bad(format!("`{key}` expects a decimal number, got `{s}`")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_grammar() {
        let c = Config::parse("# run\neps = 0.08, 0.04,0.02\n\nt=0.3  # time\nprofile = sech2\nn = 8192\n").unwrap();
        assert_eq!(c.f64_list("eps").unwrap(), Some(vec![0.08, 0.04, 0.02]));
        assert_eq!(c.f64("t").unwrap(), Some(0.3));
        assert_eq!(c.str("profile"), Some("sech2"));
        assert_eq!(c.usize("n").unwrap(), Some(8192));
        assert_eq!(c.f64("missing").unwrap(), None);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(Config::parse("eps 0.1").is_err());
        assert!(Config::parse("1eps = 0.1").is_err());
        assert!(Config::parse("a = 1\na = 2").is_err());
        assert!(Config::parse("a = 1,,2").is_err());
        assert!(Config::parse("a = \"x\"").is_err());
        assert!(Config::parse("a = ").is_err());
    }

    #[test]
    fn typed_getters_validate() {
        let c = Config::parse("a = x\nb = -3\nc = nan\nd = on").unwrap();
        assert!(c.f64("a").is_err());
        assert!(c.usize("b").is_err());
        assert!(c.f64("c").is_err());
        assert_eq!(c.bool("d").unwrap(), Some(true));
    }

    #[test]
    fn overrides_replace_entries() {
        let mut c = Config::parse("t = 0.3").unwrap();
        c.set_pair("t=0.4").unwrap();
        c.set_pair("n = 1024").unwrap();
        assert_eq!(c.f64("t").unwrap(), Some(0.4));
        assert_eq!(c.usize("n").unwrap(), Some(1024));
        assert!(c.set_pair("novalue").is_err());
        assert!(c.check_keys(&["t", "n"]).is_ok());
        assert!(c.check_keys(&["t"]).is_err());
    }
}
