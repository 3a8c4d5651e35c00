//! Horizontal droplet dynamics: wave-slope propulsion during contact,
//! contact-modulated skidding drag plus Stokes air drag, and the periodic
//! normal-force waveform that feeds back into the bath.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::params::{DropParams, FluidParams, ForcingParams, G};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DropState {
    pub position: [f64; 2],
    pub velocity: [f64; 2],
    /// Time into the current Faraday period, in [0, T_F).
    pub bounce_phase: f64,
}

/// Periodic contact-force waveform of a period-doubled bouncer.
#[derive(Debug, Clone, Copy)]
pub struct ContactForce {
    t_f: f64,
    tau_c: f64,
    offset: f64,
    peak: f64,
}

impl ContactForce {
    pub fn new(drop: &DropParams, forcing: &ForcingParams) -> Self {
        let t_f = forcing.faraday_period();
        Self {
            t_f,
            tau_c: drop.tau_c,
            offset: drop.impact_phase * t_f,
            peak: 2.0 * drop.mass * G * t_f / drop.tau_c,
        }
    }

    pub fn peak(&self) -> f64 {
        self.peak
    }

    /// Instantaneous force F(t) (N).
    pub fn at(&self, t: f64) -> f64 {
        let s = (t - self.offset).rem_euclid(self.t_f);
        if s < self.tau_c {
            self.peak * (PI * s / self.tau_c).sin().powi(2)
        } else {
            0.0
        }
    }

    /// ∫₀ᵗ F dt' up to an additive constant.
    fn cumulative(&self, t: f64) -> f64 {
        let u = t - self.offset;
        let periods = (u / self.t_f).floor();
        let s = (u - periods * self.t_f).clamp(0.0, self.t_f);
        let c = s.min(self.tau_c);
        let within = self.peak * (0.5 * c - self.tau_c / (4.0 * PI) * (2.0 * PI * c / self.tau_c).sin());
        periods * self.peak * 0.5 * self.tau_c + within
    }

    /// Exact mean of F over `[t0, t1]`.
    pub fn mean(&self, t0: f64, t1: f64) -> f64 {
        (self.cumulative(t1) - self.cumulative(t0)) / (t1 - t0)
    }
}

/// F(t) for the given drop and forcing.
pub fn contact_force(t: f64, drop: &DropParams, forcing: &ForcingParams) -> f64 {
    ContactForce::new(drop, forcing).at(t)
}

/// D(F) = c_skid·√(ρR/σ)·F + 6πRμ_air (kg/s).
pub fn drag_coefficient(force: f64, drop: &DropParams, fluid: &FluidParams) -> f64 {
    drop.c_skid * (fluid.rho * drop.radius / fluid.sigma).sqrt() * force
        + 6.0 * PI * drop.radius * drop.mu_air
}

/// Impulses accumulated over one step, with the RK4 quadrature weights.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepImpulse {
    /// ∫ −F∇η dt (N·s).
    pub wave: [f64; 2],
    /// ∫ −D V dt (N·s).
    pub drag: [f64; 2],
}

/// Advances `m dV/dt = −F∇η(X) − D(F)V`, `dX/dt = V` by RK4, re-sampling the
/// slope at each substep position from a frozen wave field.
pub fn step_drop<S>(
    state: &DropState,
    mut slope: S,
    force: f64,
    dt: f64,
    drop: &DropParams,
    fluid: &FluidParams,
    t_f: f64,
) -> Result<(DropState, StepImpulse)>
where
    S: FnMut([f64; 2]) -> Result<[f64; 2]>,
{
    let m = drop.mass;
    let damping = drag_coefficient(force, drop, fluid);
    let mut accel = |x: [f64; 2], v: [f64; 2]| -> Result<([f64; 2], [f64; 2], [f64; 2])> {
        let s = slope(x)?;
        let wave = [-force * s[0], -force * s[1]];
        let drag = [-damping * v[0], -damping * v[1]];
        Ok(([(wave[0] + drag[0]) / m, (wave[1] + drag[1]) / m], wave, drag))
    };
    let add = |a: [f64; 2], b: [f64; 2], h: f64| [a[0] + h * b[0], a[1] + h * b[1]];

    let (x0, v0) = (state.position, state.velocity);
    let (a1, w1, d1) = accel(x0, v0)?;
    let (x1, v1) = (add(x0, v0, 0.5 * dt), add(v0, a1, 0.5 * dt));
    let (a2, w2, d2) = accel(x1, v1)?;
    let (x2, v2) = (add(x0, v1, 0.5 * dt), add(v0, a2, 0.5 * dt));
    let (a3, w3, d3) = accel(x2, v2)?;
    let (x3, v3) = (add(x0, v2, dt), add(v0, a3, dt));
    let (a4, w4, d4) = accel(x3, v3)?;

    let combine = |k1: [f64; 2], k2: [f64; 2], k3: [f64; 2], k4: [f64; 2]| {
        [
            dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ]
    };
    let dx = combine(v0, v1, v2, v3);
    let dv = combine(a1, a2, a3, a4);
    let impulse = StepImpulse {
        wave: combine(w1, w2, w3, w4),
        drag: combine(d1, d2, d3, d4),
    };
    let next = DropState {
        position: [x0[0] + dx[0], x0[1] + dx[1]],
        velocity: [v0[0] + dv[0], v0[1] + dv[1]],
        bounce_phase: (state.bounce_phase + dt).rem_euclid(t_f),
    };
    Ok((next, impulse))
}
