//! Layered run configuration: built-in defaults, then a config file, then
//! command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

/// Name of the resolved configuration written beside every run's outputs.
pub const RESOLVED_CONFIG: &str = "config.json";

/// Flags shared by every command.
#[derive(Args, Debug, Clone, Serialize)]
pub struct CommonFlags {
    /// JSON or TOML file with parameters; flags take precedence.
    #[arg(long, value_name = "FILE")]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Directory receiving the outputs.
    #[arg(long = "out", value_name = "DIR")]
    #[serde(rename = "output_dir", skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,

    /// Seed for any randomized sampling.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

/// Output location and seed, present in every resolved configuration.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Common {
    pub output_dir: PathBuf,
    pub seed: u64,
}

impl Default for Common {
    fn default() -> Self {
        Self {
            output_dir: PathBuf::from("levelcross-out"),
            seed: 0,
        }
    }
}

fn read_file(path: &Path) -> Result<Map<String, Value>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))?;
    let value: Value = if path.extension().is_some_and(|e| e == "toml") {
        let t: toml::Value =
            toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        serde_json::to_value(t)?
    } else {
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?
    };
    match value {
        Value::Object(m) => Ok(m),
        _ => bail!("config {} must hold a table of parameters", path.display()),
    }
}

/// Resolves a command configuration `C` from its defaults, the optional
/// file in `common.config` and the flag record `flags` (unset flags are
/// skipped when serialized).
pub fn resolve<C, F>(common: &CommonFlags, flags: &F) -> Result<C>
where
    C: Serialize + DeserializeOwned + Default,
    F: Serialize,
{
    let Value::Object(mut merged) = serde_json::to_value(C::default())? else {
        unreachable!("configurations serialize as maps")
    };
    let mut layers = Vec::new();
    if let Some(path) = &common.config {
        layers.push(read_file(path)?);
    }
    for value in [serde_json::to_value(common)?, serde_json::to_value(flags)?] {
        if let Value::Object(m) = value {
            layers.push(m);
        }
    }
    for layer in layers {
        for (k, v) in layer {
            if !merged.contains_key(&k) {
                bail!("unknown configuration key `{k}`");
            }
            merged.insert(k, v);
        }
    }
    serde_json::from_value(Value::Object(merged)).context("invalid configuration")
}

/// Creates the output directory and writes the resolved configuration.
pub fn prepare_output<C: Serialize>(dir: &Path, resolved: &C) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    write_json(&dir.join(RESOLVED_CONFIG), resolved)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}
