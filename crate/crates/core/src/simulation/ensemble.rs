use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_prepared, Prepared, SimConfig, TrajectoryRecord};
use crate::error::{Error, Result};

/// Memory sweeps are rejected at or above this γ/γ_F: the linear wave model
/// is not trusted that close to threshold.
pub const MAX_SWEEP_RATIO: f64 = 0.93;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    pub base: SimConfig,
    /// Lateral launch offsets (m).
    pub impact_parameters: Vec<f64>,
}

impl EnsembleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.impact_parameters.iter().any(|x| !x.is_finite()) {
            return Err(Error::Validation("impact parameters must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub gamma_ratio: f64,
    pub records: Vec<TrajectoryRecord>,
}

fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Validation(format!("cannot start {threads} worker threads: {e}")))
}

/// Runs every member on `threads` workers. Members are independent and
/// single-threaded, so the output does not depend on the thread count;
/// records are ordered by ensemble index.
pub fn run_ensemble(spec: &EnsembleSpec, threads: usize) -> Result<Vec<TrajectoryRecord>> {
    spec.validate()?;
    if spec.impact_parameters.is_empty() {
        return Ok(Vec::new());
    }
    let base = Prepared::new(&spec.base)?;
    let members: Vec<Prepared> = spec
        .impact_parameters
        .iter()
        .map(|&x| {
            let mut p = base.clone();
            p.config.launch.impact_parameter = x;
            p
        })
        .collect();
    pool(threads)?.install(|| members.par_iter().map(run_prepared).collect())
}

/// The same ensemble at each γ/γ_F in `ratios`.
pub fn sweep_memory(spec: &EnsembleSpec, ratios: &[f64], threads: usize) -> Result<Vec<SweepResult>> {
    for &r in ratios {
        if !(r.is_finite() && r > 0.0 && r < MAX_SWEEP_RATIO) {
            return Err(Error::Validation(format!(
                "memory value {r} outside (0, {MAX_SWEEP_RATIO}): the wave model is not valid this close to threshold"
            )));
        }
    }
    ratios
        .iter()
        .map(|&r| {
            let mut s = spec.clone();
            s.base.forcing = s.base.forcing.with_gamma_ratio(r);
            Ok(SweepResult {
                gamma_ratio: r,
                records: run_ensemble(&s, threads)?,
            })
        })
        .collect()
}
