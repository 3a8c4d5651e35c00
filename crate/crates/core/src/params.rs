//! Physical constants of the bath, the vibration and the droplet, and the
//! scales derived from them (Faraday wavenumber, decay time, memory).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gravitational acceleration (m/s²). Accelerations are stored in units of this.
pub const G: f64 = 9.81;

/// Upper end of the Faraday-wavenumber bracket (1/m).
const K_BRACKET_MAX: f64 = 1.0e5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FluidParams {
    /// Surface tension (N/m).
    pub sigma: f64,
    /// Kinematic viscosity (m²/s).
    pub nu: f64,
    /// Effective viscosity of the damped wave model (m²/s).
    pub nu_eff: f64,
    /// Density (kg/m³).
    pub rho: f64,
    /// Ambient bath depth (m).
    pub h0: f64,
}

impl Default for FluidParams {
    /// 20 cSt silicone oil, 7 mm deep.
    fn default() -> Self {
        let nu = 20.0e-6;
        Self {
            sigma: 0.0209,
            nu,
            nu_eff: 0.8 * nu,
            rho: 965.0,
            h0: 7.0e-3,
        }
    }
}

impl FluidParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("sigma", self.sigma),
            ("nu", self.nu),
            ("nu_eff", self.nu_eff),
            ("rho", self.rho),
            ("h0", self.h0),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "fluid.{name} must be finite and > 0 (got {v})"
                )));
            }
        }
        if self.nu_eff > self.nu {
            return Err(Error::InvalidParameter(format!(
                "fluid.nu_eff ({}) must not exceed fluid.nu ({})",
                self.nu_eff, self.nu
            )));
        }
        Ok(())
    }

    /// σ/ρ (m³/s²).
    pub fn capillary(&self) -> f64 {
        self.sigma / self.rho
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForcingParams {
    /// Driving frequency (Hz).
    #[serde(rename = "frequency")]
    pub f: f64,
    /// Peak vibrational acceleration (units of g).
    pub gamma: f64,
    /// Faraday threshold (units of g).
    #[serde(rename = "gamma_faraday")]
    pub gamma_f: f64,
}

impl Default for ForcingParams {
    fn default() -> Self {
        Self {
            f: 75.0,
            gamma: 0.905 * 3.82,
            gamma_f: 3.82,
        }
    }
}

impl ForcingParams {
    /// Angular driving frequency 2πf (rad/s).
    pub fn omega0(&self) -> f64 {
        2.0 * PI * self.f
    }

    /// Faraday period 2/f (s): one bounce of a period-doubled walker.
    pub fn faraday_period(&self) -> f64 {
        2.0 / self.f
    }

    pub fn gamma_ratio(&self) -> f64 {
        self.gamma / self.gamma_f
    }

    pub fn with_gamma_ratio(mut self, ratio: f64) -> Self {
        self.gamma = ratio * self.gamma_f;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.f.is_finite() && self.f > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "forcing.frequency must be > 0 (got {})",
                self.f
            )));
        }
        if !(self.gamma_f.is_finite() && self.gamma_f > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "forcing.gamma_faraday must be > 0 (got {})",
                self.gamma_f
            )));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "forcing.gamma must be >= 0 (got {})",
                self.gamma
            )));
        }
        if self.gamma >= self.gamma_f {
            return Err(Error::AboveThreshold {
                gamma: self.gamma,
                gamma_f: self.gamma_f,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DropParams {
    /// Drop radius (m).
    pub radius: f64,
    /// Drop mass (kg), ρ·(4/3)πR³.
    pub mass: f64,
    /// Skidding-friction coefficient (dimensionless).
    pub c_skid: f64,
    /// Dynamic viscosity of air (kg/(m·s)).
    pub mu_air: f64,
    /// Contact duration per bounce (s).
    pub tau_c: f64,
    /// Start of the contact window as a fraction of the Faraday period, in [0, 1).
    pub impact_phase: f64,
}

impl DropParams {
    pub const DEFAULT_RADIUS: f64 = 0.39e-3;
    pub const DEFAULT_C_SKID: f64 = 0.17;
    pub const DEFAULT_MU_AIR: f64 = 1.8e-5;
    pub const DEFAULT_CONTACT_FRACTION: f64 = 0.25;
    pub const DEFAULT_IMPACT_PHASE: f64 = 0.41;

    /// Literature-regime defaults for a drop of the given bath, with τ_c = T_F/4.
    pub fn with_defaults(fluid: &FluidParams, forcing: &ForcingParams) -> Self {
        Self::new(
            Self::DEFAULT_RADIUS,
            fluid.rho,
            Self::DEFAULT_C_SKID,
            Self::DEFAULT_MU_AIR,
            Self::DEFAULT_CONTACT_FRACTION * forcing.faraday_period(),
            Self::DEFAULT_IMPACT_PHASE,
        )
    }

    pub fn new(
        radius: f64,
        rho: f64,
        c_skid: f64,
        mu_air: f64,
        tau_c: f64,
        impact_phase: f64,
    ) -> Self {
        Self {
            radius,
            mass: rho * (4.0 / 3.0) * PI * radius.powi(3),
            c_skid,
            mu_air,
            tau_c,
            impact_phase,
        }
    }

    /// Impact phase in radians relative to the Faraday period.
    pub fn phi_imp(&self) -> f64 {
        2.0 * PI * self.impact_phase
    }

    pub fn validate(&self, fluid: &FluidParams, forcing: &ForcingParams) -> Result<()> {
        for (name, v) in [
            ("radius", self.radius),
            ("c_skid", self.c_skid),
            ("mu_air", self.mu_air),
            ("tau_c", self.tau_c),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "drop.{name} must be finite and > 0 (got {v})"
                )));
            }
        }
        if self.tau_c >= forcing.faraday_period() {
            return Err(Error::InvalidParameter(format!(
                "drop contact time {} s must be shorter than the Faraday period {} s",
                self.tau_c,
                forcing.faraday_period()
            )));
        }
        if !(0.0..1.0).contains(&self.impact_phase) {
            return Err(Error::InvalidParameter(format!(
                "drop.impact_phase must lie in [0, 1) (got {})",
                self.impact_phase
            )));
        }
        let m = fluid.rho * (4.0 / 3.0) * PI * self.radius.powi(3);
        if ((self.mass - m) / m).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "drop mass {} kg inconsistent with radius and density ({m} kg)",
                self.mass
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedScales {
    /// Faraday wavenumber (1/m).
    pub k_f: f64,
    /// Faraday wavelength 2π/k_F (m).
    pub lambda_f: f64,
    /// Decay time of unforced waves at k_F (s).
    pub t_d: f64,
    /// Memory parameter.
    pub memory: f64,
}

/// Gravity-capillary dispersion relation ω² = (g·k + σk³/ρ)·tanh(k·h).
///
/// `h` may be `f64::INFINITY` for deep water.
pub fn dispersion_omega_sq(k: f64, h: f64, fluid: &FluidParams) -> Result<f64> {
    if !(k >= 0.0) {
        return Err(Error::Domain(format!("wavenumber must be >= 0 (got {k})")));
    }
    if !(h > 0.0) {
        return Err(Error::Domain(format!("depth must be > 0 (got {h})")));
    }
    Ok((G * k + fluid.capillary() * k * k * k) * (k * h).tanh())
}

/// Wavenumber of the subharmonic (f/2) Faraday response at the ambient depth.
pub fn faraday_wavenumber(fluid: &FluidParams, forcing: &ForcingParams) -> Result<f64> {
    let target = (PI * forcing.f).powi(2);
    let residual = |k: f64| dispersion_omega_sq(k, fluid.h0, fluid).map(|w2| w2 - target);

    let (mut lo, mut hi) = (0.0_f64, K_BRACKET_MAX);
    if residual(hi)? < 0.0 {
        return Err(Error::NoBracket(format!(
            "Faraday wavenumber in (0, {K_BRACKET_MAX:e}) 1/m"
        )));
    }
    // ω² is strictly increasing in k, so plain bisection converges to the
    // unique root; 200 halvings is far beyond f64 resolution.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if residual(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (rlo, rhi) = (residual(lo)?.abs(), residual(hi)?.abs());
    Ok(if rlo < rhi { lo } else { hi })
}

pub fn derived_scales(
    fluid: &FluidParams,
    forcing: &ForcingParams,
    k_f: f64,
) -> Result<DerivedScales> {
    if forcing.gamma >= forcing.gamma_f {
        return Err(Error::AboveThreshold {
            gamma: forcing.gamma,
            gamma_f: forcing.gamma_f,
        });
    }
    let t_d = 1.0 / (2.0 * fluid.nu_eff * k_f * k_f);
    let memory = t_d / (forcing.faraday_period() * (1.0 - forcing.gamma / forcing.gamma_f));
    Ok(DerivedScales {
        k_f,
        lambda_f: 2.0 * PI / k_f,
        t_d,
        memory,
    })
}

/// Long-wave coefficient b(h) = tanh(k_F·h)/k_F that reproduces the
/// finite-depth phase speed at the Faraday wavenumber.
pub fn effective_depth_b(h: f64, k_f: f64) -> f64 {
    (k_f * h).tanh() / k_f
}
