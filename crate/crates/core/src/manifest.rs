//! Run manifests: a JSON record of configuration, inputs and timings written
//! next to every output set.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::data::Dataset;
use crate::error::{Error, Result};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputRecord {
    pub name: String,
    pub path: String,
    pub sha256: String,
    pub rows: usize,
    pub features: usize,
    pub minority: usize,
    pub majority: usize,
    pub minority_label: String,
}

impl InputRecord {
    pub fn new(name: &str, path: &Path, sha256: String, ds: &Dataset) -> Self {
        InputRecord {
            name: name.to_string(),
            path: path.display().to_string(),
            sha256,
            rows: ds.n_rows(),
            features: ds.n_features(),
            minority: ds.n_minority(),
            majority: ds.n_majority(),
            minority_label: ds.label_map().minority.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    pub config: serde_json::Value,
    pub inputs: Vec<InputRecord>,
    /// Wall-clock seconds per stage.
    pub timings: BTreeMap<String, f64>,
    pub outputs: Vec<String>,
    pub failures: Vec<String>,
}

impl RunManifest {
    pub fn new(command: &str, seed: u64, config: &impl Serialize) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: VERSION.to_string(),
            command: command.to_string(),
            seed,
            config: serde_json::to_value(config).expect("config serialises"),
            inputs: Vec::new(),
            timings: BTreeMap::new(),
            outputs: Vec::new(),
            failures: Vec::new(),
        }
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let mut text = serde_json::to_string_pretty(self).map_err(|e| Error::Format(e.to_string()))?;
        text.push('\n');
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn sha256_file(path: impl AsRef<Path>) -> Result<String> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(sha256_hex(&bytes))
}
