use std::path::Path;

use sha2::{Digest, Sha256};

use serde::{Deserialize, Serialize};

use crate::bohm::EsswScenario;
use crate::error::{Error, Result};
use crate::params::{FluidParams, ForcingParams};
use crate::simulation::{
    CalibrationSettings, ClassifierParams, DropConfig, EnsembleSpec, GeometryConfig, Launch, Numerics, SimConfig,
};

/// SHA-256 of the canonical JSON serialization of a configuration.
///
/// Struct fields serialize in declaration order and floats in shortest
/// round-trip form, so the hash is the same on every platform.
pub fn config_hash(config: &SimConfig) -> String {
    let json = serde_json::to_string(config).expect("configuration serializes");
    hex::encode(Sha256::digest(json.as_bytes()))
}

/// 1-based line and column of a byte offset.
fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(text.len());
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(offset, |nl| offset - nl - 1) + 1;
    (line, column)
}

/// Parses and validates a TOML configuration. Missing keys take their
/// defaults; unknown keys are rejected.
pub fn parse_config(text: &str) -> Result<SimConfig> {
    let config: SimConfig = toml::from_str(text).map_err(|e| located(text, e))?;
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<SimConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config(&text)
}

/// Launch set and post-processing settings shared by the ensemble commands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleSection {
    /// Lateral launch offsets (m).
    pub impact_parameters: Vec<f64>,
    /// γ/γ_F values for `sweep-memory`.
    pub memory: Vec<f64>,
    /// Width of the Gaussian weighting over impact parameters in the mean
    /// field (m); defaults to 1.4 λ_F.
    pub sigma_b: Option<f64>,
}

impl Default for EnsembleSection {
    fn default() -> Self {
        Self {
            impact_parameters: Vec::new(),
            memory: vec![0.88, 0.90, 0.92],
            sigma_b: None,
        }
    }
}

/// Everything a CLI invocation reads: the simulation itself plus the
/// ensemble, calibration and Bohmian sections.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunFile {
    pub seed: u64,
    pub fluid: FluidParams,
    pub forcing: ForcingParams,
    pub drop: DropConfig,
    pub geometry: GeometryConfig,
    pub numerics: Numerics,
    pub launch: Launch,
    pub classifier: ClassifierParams,
    pub ensemble: EnsembleSection,
    pub calibration: CalibrationSettings,
    pub bohm: EsswScenario,
}

impl RunFile {
    pub fn sim(&self) -> SimConfig {
        SimConfig {
            seed: self.seed,
            fluid: self.fluid,
            forcing: self.forcing,
            drop: self.drop,
            geometry: self.geometry,
            numerics: self.numerics,
            launch: self.launch,
            classifier: self.classifier,
        }
    }

    pub fn ensemble_spec(&self) -> EnsembleSpec {
        EnsembleSpec {
            base: self.sim(),
            impact_parameters: self.ensemble.impact_parameters.clone(),
        }
    }
}

fn located(text: &str, e: toml::de::Error) -> Error {
    let (line, column) = e.span().map_or((0, 0), |s| line_column(text, s.start));
    Error::ConfigParse {
        line,
        column,
        message: e.message().to_string(),
    }
}

pub fn parse_run_file(text: &str) -> Result<RunFile> {
    let run: RunFile = toml::from_str(text).map_err(|e| located(text, e))?;
    run.sim().validate()?;
    run.ensemble_spec().validate()?;
    if let Some(s) = run.ensemble.sigma_b {
        if !(s > 0.0 && s.is_finite()) {
            return Err(Error::Validation(format!("ensemble.sigma_b must be positive (got {s})")));
        }
    }
    Ok(run)
}

pub fn load_run_file(path: &Path) -> Result<RunFile> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_run_file(&text)
}

pub fn serialize_config(config: &SimConfig) -> Result<String> {
    toml::to_string_pretty(config).map_err(|e| Error::Validation(format!("cannot serialize configuration: {e}")))
}
