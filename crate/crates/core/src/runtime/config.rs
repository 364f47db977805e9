use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::ClauseRef;

pub const DEFAULT_NOMINAL_SPEED: f64 = 1.0;
pub const DEFAULT_CAP: f64 = 0.3;

/// Speeds used when lowering a program.
///
/// `cap_speed` has no argument in the rule language; its value comes from
/// `caps` for that clause if present, otherwise from `default_cap`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonitorConfig {
    /// Speed in m/s when no rule restricts driving.
    pub nominal_speed: f64,
    /// Speed in m/s applied by `cap_speed` clauses without an override.
    pub default_cap: f64,
    pub caps: BTreeMap<ClauseRef, f64>,
}

impl Default for MonitorConfig {
    fn default() -> Self {
        MonitorConfig {
            nominal_speed: DEFAULT_NOMINAL_SPEED,
            default_cap: DEFAULT_CAP,
            caps: BTreeMap::new(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("E-IO: {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("E-FORMAT: {0}")]
    Format(String),
    #[error("E-CONFIG: {0}")]
    Invalid(String),
}

impl ConfigError {
    pub fn code(&self) -> &'static str {
        match self {
            ConfigError::Io { .. } => "E-IO",
            ConfigError::Format(_) => "E-FORMAT",
            ConfigError::Invalid(_) => "E-CONFIG",
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    #[serde(default = "default_nominal")]
    nominal_speed: f64,
    #[serde(default = "default_cap")]
    default_cap: f64,
    #[serde(default)]
    caps: BTreeMap<String, f64>,
}

fn default_nominal() -> f64 {
    DEFAULT_NOMINAL_SPEED
}

fn default_cap() -> f64 {
    DEFAULT_CAP
}

impl MonitorConfig {
    pub fn with_cap(mut self, group: usize, clause: usize, speed: f64) -> Self {
        self.caps.insert(ClauseRef::new(group, clause), speed);
        self
    }

    /// Cap applied by clause `at`.
    pub fn cap_for(&self, at: ClauseRef) -> f64 {
        self.caps.get(&at).copied().unwrap_or(self.default_cap)
    }

    /// Parses `{"nominal_speed": .., "default_cap": .., "caps": {"g.c": ..}}`;
    /// every key is optional.
    pub fn from_json(text: &str) -> Result<MonitorConfig, ConfigError> {
        let file: ConfigFile = serde_json::from_str(text).map_err(|e| {
            ConfigError::Format(format!("line {} column {}: {e}", e.line(), e.column()))
        })?;
        let mut caps = BTreeMap::new();
        for (key, value) in file.caps {
            let parsed = key
                .split_once('.')
                .and_then(|(g, c)| Some(ClauseRef::new(g.parse().ok()?, c.parse().ok()?)));
            match parsed {
                Some(at) => {
                    caps.insert(at, value);
                }
                None => {
                    return Err(ConfigError::Format(format!(
                        "cap key `{key}` is not of the form `<group>.<clause>`"
                    )))
                }
            }
        }
        Ok(MonitorConfig {
            nominal_speed: file.nominal_speed,
            default_cap: file.default_cap,
            caps,
        })
    }

    pub fn load(path: &Path) -> Result<MonitorConfig, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        MonitorConfig::from_json(&text)
    }
}
