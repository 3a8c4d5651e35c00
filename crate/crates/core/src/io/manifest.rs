use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::write_atomic;

pub const MANIFEST_NAME: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_hash: String,
    pub software_version: String,
    pub seed: u64,
    /// Wall-clock times, seconds since the Unix epoch.
    pub start_time: f64,
    pub end_time: f64,
    pub termination: String,
    /// Paths relative to the output directory.
    pub outputs: Vec<String>,
}

pub fn now() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64())
}

impl RunManifest {
    pub fn start(config_hash: String, seed: u64) -> Self {
        Self {
            config_hash,
            software_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            start_time: now(),
            end_time: f64::NAN,
            termination: String::new(),
            outputs: Vec::new(),
        }
    }

    /// Stamps the end time and writes `manifest.json` into `dir`.
    pub fn finish(mut self, dir: &Path, termination: &str) -> Result<Self> {
        self.end_time = now();
        self.termination = termination.to_string();
        let json = serde_json::to_vec_pretty(&self).map_err(|e| Error::Validation(format!("manifest: {e}")))?;
        write_atomic(&dir.join(MANIFEST_NAME), &json)?;
        Ok(self)
    }
}

pub fn read_manifest(dir: &Path) -> Result<RunManifest> {
    let path = dir.join(MANIFEST_NAME);
    let bytes = std::fs::read(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_slice(&bytes).map_err(|e| Error::Validation(format!("{}: {e}", path.display())))
}
