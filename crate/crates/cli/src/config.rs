//! `key = value` configuration files merged under command-line flags.

use crate::CliError;
use saddle_core::periods::SeedBox;
use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

/// Settings read from a file. Keys are the long flag names; `_` and `-` are
/// interchangeable.
#[derive(Debug, Default, Clone)]
pub struct FileConfig {
    values: HashMap<String, String>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('_', "-")
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = HashMap::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::Invalid(format!("config line {}: expected `key = value`", n + 1))
            })?;
            values.insert(normalize(k), v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(&normalize(key)).map(String::as_str)
    }

    /// The flag value if given, else the file value, else `None`.
    pub fn opt<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.raw(key) {
            None => Ok(None),
            Some(s) => s
                .parse()
                .map(Some)
                .map_err(|_| CliError::Invalid(format!("config key `{key}`: cannot parse `{s}`"))),
        }
    }

    pub fn get<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError> {
        Ok(self.opt(flag, key)?.unwrap_or(default))
    }

    pub fn flag(&self, flag: bool, key: &str) -> Result<bool, CliError> {
        if flag {
            return Ok(true);
        }
        self.get(None, key, false)
    }

    pub fn list(&self, flag: Option<String>, key: &str, default: &str) -> Result<Vec<f64>, CliError> {
        let s = self.get(flag, key, default.to_string())?;
        parse_list(&s)
    }

    pub fn seed_box(&self, flag: Option<String>, key: &str) -> Result<SeedBox, CliError> {
        match self.opt(flag, key)? {
            None => Ok(SeedBox::SEED_WINDOW),
            Some(s) => parse_box(&s),
        }
    }
}

pub fn parse_list(s: &str) -> Result<Vec<f64>, CliError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Invalid(format!("not a number: `{v}`")))
        })
        .collect()
}

pub fn parse_box(s: &str) -> Result<SeedBox, CliError> {
    let v = parse_list(s)?;
    if v.len() != 4 {
        return Err(CliError::Invalid(format!(
            "box needs a_lo,a_hi,b_lo,b_hi; got `{s}`"
        )));
    }
    SeedBox::new(v[0], v[1], v[2], v[3]).map_err(|e| CliError::Invalid(e.to_string()))
}

/// `NxM` grid dimensions.
pub fn parse_dims(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Invalid(format!("grid must look like 10x10, got `{s}`"));
    let (a, b) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    let n_a = a.trim().parse().map_err(|_| bad())?;
    let n_b = b.trim().parse().map_err(|_| bad())?;
    Ok((n_a, n_b))
}
