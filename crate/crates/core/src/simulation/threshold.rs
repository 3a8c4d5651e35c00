use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::params::{faraday_wavenumber, FluidParams, ForcingParams};
use crate::topography::DepthMap;
use crate::wavefield::{DropForcing, WaveModel, WaveSolver, WaveState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalibrationSettings {
    /// Grid points per side of the square open bath (8 per Faraday wavelength).
    pub n: usize,
    /// Length of each trial in Faraday periods; energy is compared between
    /// the midpoint and the end.
    pub periods: u32,
    pub steps_per_period: u32,
    /// RMS of the seed noise (m).
    pub noise: f64,
    pub seed: u64,
    /// Bisection stops once the bracket is narrower than this (g).
    pub tolerance: f64,
    /// Initial bracket on γ (g).
    pub bracket: [f64; 2],
}

impl Default for CalibrationSettings {
    fn default() -> Self {
        Self {
            n: 128,
            periods: 50,
            steps_per_period: 64,
            noise: 1.0e-9,
            seed: 1,
            tolerance: 0.005,
            bracket: [1.0, 8.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdResult {
    /// Midpoint of the final bracket (g).
    pub gamma_f: f64,
    pub lower: f64,
    pub upper: f64,
    pub nu_eff: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NuFit {
    pub nu_eff: f64,
    pub threshold: ThresholdResult,
    /// (nu_eff, γ_F) of every calibration performed.
    pub history: Vec<(f64, f64)>,
}

/// Whether noise on an open bath grows at acceleration `gamma`:
/// E(T)/E(T/2) > 1 with T the trial length. A blow-up counts as growth.
pub fn grows(fluid: &FluidParams, forcing: &ForcingParams, gamma: f64, settings: &CalibrationSettings) -> Result<bool> {
    let mut forcing = *forcing;
    forcing.gamma = gamma;
    // Keep γ_F above γ so the parameter record stays valid; it plays no role here.
    forcing.gamma_f = forcing.gamma_f.max(2.0 * gamma);
    let k_f = faraday_wavenumber(fluid, &forcing)?;
    let lambda_f = 2.0 * std::f64::consts::PI / k_f;
    let l = settings.n as f64 * lambda_f / 8.0;
    let grid = Grid::new(settings.n, settings.n, l, l);
    let depth = DepthMap::uniform(grid, fluid.h0, k_f);
    let model = WaveModel {
        fluid: *fluid,
        forcing,
        lambda_f,
    };
    let dt = forcing.faraday_period() / settings.steps_per_period as f64;
    let state = WaveState::with_noise(&grid, settings.noise, settings.seed);
    let mut solver = WaveSolver::new(&state, &depth, model, dt)?;
    let half = (settings.periods / 2 * settings.steps_per_period) as usize;
    let mut energy_mid = 0.0;
    for n in 0..2 * half {
        match solver.step(&DropForcing::none()) {
            Ok(()) => {}
            Err(Error::BlowUp { .. }) => return Ok(true),
            Err(e) => return Err(e),
        }
        if n + 1 == half {
            energy_mid = solver.energy();
        }
    }
    let energy_end = solver.energy();
    if !(energy_mid > 0.0) {
        return Err(Error::Calibration("seed noise has no energy in the resolved band".into()));
    }
    Ok(energy_end / energy_mid > 1.0)
}

/// Bisection on γ for the onset of Faraday waves on an open bath.
pub fn calibrate_threshold(
    fluid: &FluidParams,
    forcing: &ForcingParams,
    settings: &CalibrationSettings,
) -> Result<ThresholdResult> {
    fluid.validate()?;
    let [mut lo, mut hi] = settings.bracket;
    if !(lo >= 0.0 && hi > lo && settings.tolerance > 0.0) {
        return Err(Error::Calibration(format!(
            "invalid bracket [{lo}, {hi}] or tolerance {}",
            settings.tolerance
        )));
    }
    if grows(fluid, forcing, lo, settings)? {
        return Err(Error::Calibration(format!("noise already grows at the lower bracket {lo} g")));
    }
    if !grows(fluid, forcing, hi, settings)? {
        return Err(Error::Calibration(format!("noise still decays at the upper bracket {hi} g")));
    }
    let mut trials = 2;
    while hi - lo > settings.tolerance {
        let mid = 0.5 * (lo + hi);
        if grows(fluid, forcing, mid, settings)? {
            hi = mid;
        } else {
            lo = mid;
        }
        trials += 1;
    }
    Ok(ThresholdResult {
        gamma_f: 0.5 * (lo + hi),
        lower: lo,
        upper: hi,
        nu_eff: fluid.nu_eff,
        trials,
    })
}

/// Secant iteration on `nu_eff` so that the calibrated threshold matches
/// `target` (g) to within the bisection tolerance.
pub fn fit_nu_eff(
    fluid: &FluidParams,
    forcing: &ForcingParams,
    settings: &CalibrationSettings,
    target: f64,
) -> Result<NuFit> {
    const MAX_ITER: usize = 8;
    let calibrate = |nu: f64| {
        let mut f = *fluid;
        f.nu_eff = nu;
        if nu > f.nu {
            return Err(Error::Calibration(format!(
                "matching gamma_F = {target} g needs nu_eff = {nu:e} above nu = {:e}",
                f.nu
            )));
        }
        calibrate_threshold(&f, forcing, settings)
    };
    let mut history = Vec::new();
    let mut x0 = fluid.nu_eff;
    let mut r0 = calibrate(x0)?;
    history.push((x0, r0.gamma_f));
    if (r0.gamma_f - target).abs() <= settings.tolerance {
        return Ok(NuFit { nu_eff: x0, threshold: r0, history });
    }
    // The threshold is close to proportional to the damping.
    let mut x1 = x0 * target / r0.gamma_f;
    for _ in 0..MAX_ITER {
        let r1 = calibrate(x1)?;
        history.push((x1, r1.gamma_f));
        if (r1.gamma_f - target).abs() <= settings.tolerance {
            return Ok(NuFit { nu_eff: x1, threshold: r1, history });
        }
        let slope = (r1.gamma_f - r0.gamma_f) / (x1 - x0);
        if !(slope > 0.0) {
            return Err(Error::Calibration(format!(
                "threshold is not increasing in nu_eff near {x1:e} m^2/s"
            )));
        }
        let x2 = x1 + (target - r1.gamma_f) / slope;
        (x0, r0) = (x1, r1);
        x1 = x2;
    }
    Err(Error::Calibration(format!(
        "nu_eff fit did not reach gamma_F = {target} g in {MAX_ITER} iterations"
    )))
}
