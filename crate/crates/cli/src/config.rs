//! key=value configuration files.
//!
//! One option per line, `#` starts a comment, blank lines are skipped.
//! Keys carry the same names as the long command-line flags; boolean
//! options appear under their positive name (`despeckle=false` rather
//! than a `no-` key). Command-line flags always win over the file.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::CliError;

/// Everything a config file may set. The region margins are config-only;
/// the rest mirror flags.
const KNOWN_KEYS: [&str; 26] = [
    "clahe-tiles",
    "clahe-clip",
    "se-radius",
    "resize-scale",
    "threshold",
    "polarity",
    "regional-maxima",
    "susan-t",
    "susan-g-frac",
    "susan-radius",
    "edge-thresh",
    "despeckle",
    "hard-comparator",
    "min-area-frac",
    "normalize",
    "merge-overlap",
    "upper-left-margins",
    "upper-right-margins",
    "lower-margins",
    "lr",
    "epochs",
    "goal-mse",
    "seed",
    "momentum",
    "smoothing",
    "shuffle",
];

#[derive(Debug, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn empty() -> Self {
        Config::default()
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|err| CliError::Domain(anyhow::anyhow!("config {}: {err}", path.display())))?;
        Self::parse(&text)
            .map_err(|msg| CliError::usage(format!("config {}: {msg}", path.display())))
    }

    fn parse(text: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(format!("line {line_no}: expected key=value, found '{line}'"));
            };
            let (key, value) = (key.trim(), value.trim());
            if !KNOWN_KEYS.contains(&key) {
                return Err(format!("line {line_no}: unknown key '{key}'"));
            }
            if values.insert(key.to_string(), value.to_string()).is_some() {
                return Err(format!("line {line_no}: duplicate key '{key}'"));
            }
        }
        Ok(Config { values })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        debug_assert!(KNOWN_KEYS.contains(&key), "unlisted config key {key}");
        self.values.get(key).map(String::as_str)
    }

    /// The value stored under `key`, parsed, or None when the key is absent.
    pub fn get<T>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        match self.raw(key) {
            None => Ok(None),
            Some(s) => s.parse().map(Some).map_err(|err| {
                CliError::usage(format!("config key {key}: cannot parse '{s}': {err}"))
            }),
        }
    }

    /// A value of exactly N numbers, separated by spaces or commas.
    pub fn get_list<T, const N: usize>(&self, key: &str) -> Result<Option<[T; N]>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        let Some(s) = self.raw(key) else {
            return Ok(None);
        };
        let parts: Vec<&str> = s
            .split([' ', '\t', ','])
            .filter(|p| !p.is_empty())
            .collect();
        if parts.len() != N {
            return Err(CliError::usage(format!(
                "config key {key}: expected {N} values, found {} in '{s}'",
                parts.len()
            )));
        }
        let mut out = Vec::with_capacity(N);
        for part in parts {
            out.push(part.parse().map_err(|err| {
                CliError::usage(format!("config key {key}: cannot parse '{part}': {err}"))
            })?);
        }
        Ok(Some(out.try_into().map_err(|_| ()).expect("length checked")))
    }
}
