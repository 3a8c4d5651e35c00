//! Coupled wave–droplet runs: single trajectories, impact-parameter
//! ensembles, memory sweeps and Faraday-threshold calibration.

mod ensemble;
mod threshold;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use ensemble::{run_ensemble, sweep_memory, EnsembleSpec, SweepResult, MAX_SWEEP_RATIO};
pub use threshold::{calibrate_threshold, fit_nu_eff, grows, CalibrationSettings, NuFit, ThresholdResult};

use crate::droplet::{step_drop, ContactForce, DropState};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::params::{faraday_wavenumber, DropParams, FluidParams, ForcingParams};
use crate::topography::{rasterize_depth, DepthMap, EsswLayout, GeometrySpec, Variant};
use crate::wavefield::{init_state, DropForcing, WaveModel, WaveSolver};

/// Drop properties as configured; the mass follows from radius and density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DropConfig {
    /// Radius (m).
    pub radius: f64,
    pub c_skid: f64,
    /// Air viscosity (kg/(m·s)).
    pub mu_air: f64,
    /// Contact duration as a fraction of the Faraday period.
    pub contact_fraction: f64,
    /// Start of the contact window as a fraction of the Faraday period.
    pub impact_phase: f64,
}

impl Default for DropConfig {
    fn default() -> Self {
        Self {
            radius: DropParams::DEFAULT_RADIUS,
            c_skid: DropParams::DEFAULT_C_SKID,
            mu_air: DropParams::DEFAULT_MU_AIR,
            contact_fraction: DropParams::DEFAULT_CONTACT_FRACTION,
            impact_phase: DropParams::DEFAULT_IMPACT_PHASE,
        }
    }
}

impl DropConfig {
    pub fn params(&self, fluid: &FluidParams, forcing: &ForcingParams) -> DropParams {
        DropParams::new(
            self.radius,
            fluid.rho,
            self.c_skid,
            self.mu_air,
            self.contact_fraction * forcing.faraday_period(),
            self.impact_phase,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    pub variant: Variant,
    pub layout: EsswLayout,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            variant: Variant::TwoBarrier,
            layout: EsswLayout::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Numerics {
    pub nx: usize,
    pub ny: usize,
    /// Time steps per Faraday period.
    pub steps_per_period: u32,
    /// Run length in Faraday periods.
    pub periods: f64,
    /// Wave snapshot cadence in Faraday periods; 0 disables snapshots.
    pub snapshot_every: f64,
    /// Pressure kernel width (m); defaults to max(R, 2·dx).
    pub kernel_width: Option<f64>,
    /// RMS of the initial white-noise elevation (m).
    pub noise: f64,
    /// End the run once the drop passes the detector line.
    pub stop_at_detector: bool,
}

impl Default for Numerics {
    fn default() -> Self {
        Self {
            nx: 128,
            ny: 160,
            steps_per_period: 64,
            periods: 500.0,
            snapshot_every: 4.0,
            kernel_width: None,
            noise: 0.0,
            stop_at_detector: true,
        }
    }
}

/// Initial drop state. Positions in metres; the default height is the middle
/// of the launch corridor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Launch {
    /// Lateral offset from the centreline (m).
    pub impact_parameter: f64,
    /// Launch height (m); `None` uses the corridor middle.
    pub y: Option<f64>,
    /// Launch speed (m/s).
    pub speed: f64,
    /// Direction of launch, degrees counter-clockwise from +x (−90 = straight down).
    pub direction_deg: f64,
    /// Half-width of a uniform random offset added to the impact parameter (m).
    pub jitter: f64,
    /// Half-width of a uniform random perturbation of the direction (degrees).
    pub angle_jitter_deg: f64,
}

impl Default for Launch {
    fn default() -> Self {
        Self {
            impact_parameter: 0.0,
            y: None,
            speed: 8.0e-3,
            direction_deg: -90.0,
            jitter: 0.0,
            angle_jitter_deg: 0.0,
        }
    }
}

/// Classification thresholds, in Faraday wavelengths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClassifierParams {
    /// Approach distance that counts as reaching a barrier.
    pub reflection_distance: f64,
    /// Depth of the detector line below the barrier tips.
    pub detector_offset: f64,
}

impl Default for ClassifierParams {
    fn default() -> Self {
        Self {
            reflection_distance: 1.5,
            detector_offset: 4.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub seed: u64,
    pub fluid: FluidParams,
    pub forcing: ForcingParams,
    pub drop: DropConfig,
    pub geometry: GeometryConfig,
    pub numerics: Numerics,
    pub launch: Launch,
    pub classifier: ClassifierParams,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.fluid.validate()?;
        self.forcing.validate()?;
        let drop = self.drop.params(&self.fluid, &self.forcing);
        drop.validate(&self.fluid, &self.forcing)?;
        let n = &self.numerics;
        if n.nx < 8 || n.ny < 8 {
            return Err(Error::Validation(format!(
                "numerics.nx and numerics.ny must be at least 8 (got {} x {})",
                n.nx, n.ny
            )));
        }
        if n.steps_per_period < 64 {
            return Err(Error::Validation(format!(
                "numerics.steps_per_period must be at least 64 (got {})",
                n.steps_per_period
            )));
        }
        if !(n.periods.is_finite() && n.periods > 0.0) {
            return Err(Error::Validation(format!(
                "numerics.periods must be > 0 (got {})",
                n.periods
            )));
        }
        if !(n.snapshot_every.is_finite() && n.snapshot_every >= 0.0) {
            return Err(Error::Validation(format!(
                "numerics.snapshot_every must be >= 0 (got {})",
                n.snapshot_every
            )));
        }
        if let Some(w) = n.kernel_width {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::Validation(format!(
                    "numerics.kernel_width must be > 0 (got {w})"
                )));
            }
        }
        if !(n.noise.is_finite() && n.noise >= 0.0) {
            return Err(Error::Validation(format!(
                "numerics.noise must be >= 0 (got {})",
                n.noise
            )));
        }
        let l = &self.launch;
        for (name, v) in [
            ("launch.impact_parameter", l.impact_parameter),
            ("launch.speed", l.speed),
            ("launch.direction_deg", l.direction_deg),
            ("launch.jitter", l.jitter),
            ("launch.angle_jitter_deg", l.angle_jitter_deg),
        ] {
            if !v.is_finite() {
                return Err(Error::Validation(format!("{name} must be finite")));
            }
        }
        if l.speed < 0.0 || l.jitter < 0.0 || l.angle_jitter_deg < 0.0 {
            return Err(Error::Validation(
                "launch.speed, launch.jitter and launch.angle_jitter_deg must be >= 0".into(),
            ));
        }
        let c = &self.classifier;
        if !(c.reflection_distance > 0.0 && c.detector_offset > 0.0) {
            return Err(Error::Validation(
                "classifier distances must be > 0".into(),
            ));
        }
        let g = &self.geometry.layout;
        if g.domain.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Validation("geometry.layout.domain must be positive".into()));
        }
        Ok(())
    }

    pub fn drop_params(&self) -> DropParams {
        self.drop.params(&self.fluid, &self.forcing)
    }
}

/// Everything about a configuration that does not depend on the launch.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub config: SimConfig,
    pub k_f: f64,
    pub lambda_f: f64,
    pub geometry: GeometrySpec,
    pub depth: DepthMap,
    pub drop: DropParams,
    pub dt: f64,
    pub kernel_width: f64,
}

impl Prepared {
    pub fn new(config: &SimConfig) -> Result<Self> {
        config.validate()?;
        let k_f = faraday_wavenumber(&config.fluid, &config.forcing)?;
        let lambda_f = 2.0 * std::f64::consts::PI / k_f;
        let geometry = config
            .geometry
            .layout
            .build(lambda_f, config.geometry.variant, config.fluid.h0);
        let depth = rasterize_depth(&geometry, config.numerics.nx, config.numerics.ny, k_f)?;
        let drop = config.drop_params();
        let dt = config.forcing.faraday_period() / config.numerics.steps_per_period as f64;
        let kernel_width = config.numerics.kernel_width.unwrap_or(drop.radius);
        Ok(Self {
            config: *config,
            k_f,
            lambda_f,
            geometry,
            depth,
            drop,
            dt,
            kernel_width,
        })
    }

    pub fn grid(&self) -> Grid {
        self.depth.grid
    }

    pub fn model(&self) -> WaveModel {
        WaveModel {
            fluid: self.config.fluid,
            forcing: self.config.forcing,
            lambda_f: self.lambda_f,
        }
    }

    /// Landmarks used by the classifier, in metres.
    pub fn landmarks(&self) -> Landmarks {
        let layout = &self.config.geometry.layout;
        let l = self.lambda_f;
        Landmarks {
            lambda_f: l,
            splitter_bottom_y: layout.splitter_bottom() * l,
            barrier_tip_y: layout.barrier_tip_y() * l,
            detector_y: (layout.barrier_tip_y() - self.config.classifier.detector_offset) * l,
            reflection_distance: self.config.classifier.reflection_distance * l,
        }
    }

    /// Initial drop position and velocity, including seeded jitter.
    pub fn launch_state(&self) -> DropState {
        let launch = &self.config.launch;
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        let mut x = launch.impact_parameter;
        let mut angle = launch.direction_deg;
        if launch.jitter > 0.0 {
            x += rng.random_range(-launch.jitter..=launch.jitter);
        }
        if launch.angle_jitter_deg > 0.0 {
            angle += rng.random_range(-launch.angle_jitter_deg..=launch.angle_jitter_deg);
        }
        let y = launch
            .y
            .unwrap_or(self.config.geometry.layout.launch_y() * self.lambda_f);
        let a = angle.to_radians();
        DropState {
            position: [x, y],
            velocity: [launch.speed * a.cos(), launch.speed * a.sin()],
            bounce_phase: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Landmarks {
    pub lambda_f: f64,
    pub splitter_bottom_y: f64,
    pub barrier_tip_y: f64,
    pub detector_y: f64,
    pub reflection_distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub vx: f64,
    pub vy: f64,
    /// Instantaneous normal force (N).
    pub force: f64,
    /// Time into the current Faraday period (s).
    pub phase: f64,
}

impl Sample {
    pub fn position(&self) -> [f64; 2] {
        [self.x, self.y]
    }

    pub fn velocity(&self) -> [f64; 2] {
        [self.vx, self.vy]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub drop_position: [f64; 2],
    pub eta: Vec<f64>,
    pub phi: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "cause", rename_all = "snake_case")]
pub enum Termination {
    Completed,
    Detector { t: f64 },
    DomainExit { t: f64 },
    BlowUp { t: f64 },
}

impl Termination {
    pub fn name(&self) -> &'static str {
        match self {
            Termination::Completed => "completed",
            Termination::Detector { .. } => "detector",
            Termination::DomainExit { .. } => "domain_exit",
            Termination::BlowUp { .. } => "blow_up",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub config_hash: String,
    pub seed: u64,
    pub variant: Variant,
    pub gamma_ratio: f64,
    pub impact_parameter: f64,
    pub lambda_f: f64,
    pub faraday_period: f64,
    pub dt: f64,
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub kernel_width: f64,
    pub landmarks: Landmarks,
    pub termination: Termination,
    /// Natural (ħ = m = 1) rather than SI units.
    #[serde(default)]
    pub natural_units: bool,
    pub config: Option<SimConfig>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryRecord {
    pub meta: TrajectoryMeta,
    pub samples: Vec<Sample>,
    pub snapshots: Vec<Snapshot>,
}

impl TrajectoryRecord {
    pub fn grid(&self) -> Grid {
        Grid {
            nx: self.meta.nx,
            ny: self.meta.ny,
            dx: self.meta.dx,
            dy: self.meta.dy,
        }
    }
}

pub fn run_single(config: &SimConfig) -> Result<TrajectoryRecord> {
    let prepared = Prepared::new(config)?;
    run_prepared(&prepared)
}

/// Lockstep loop: step-averaged contact force → pressure deposit → wave step
/// → slope sampling on the new wave → drop step.
pub fn run_prepared(p: &Prepared) -> Result<TrajectoryRecord> {
    let cfg = &p.config;
    let grid = p.grid();
    let t_f = cfg.forcing.faraday_period();
    let contact = ContactForce::new(&p.drop, &cfg.forcing);
    let wave0 = init_state(&p.depth, cfg.numerics.noise, cfg.seed);
    let mut solver = WaveSolver::new(&wave0, &p.depth, p.model(), p.dt)?;
    let mut drop = p.launch_state();
    if !grid.contains(drop.position) {
        return Err(Error::Validation(format!(
            "launch position ({:.4e}, {:.4e}) m is outside the domain",
            drop.position[0], drop.position[1]
        )));
    }

    let steps = (cfg.numerics.periods * cfg.numerics.steps_per_period as f64).round() as usize;
    let snapshot_steps = (cfg.numerics.snapshot_every * cfg.numerics.steps_per_period as f64).round() as usize;
    let landmarks = p.landmarks();
    let sample = |t: f64, d: &DropState| Sample {
        t,
        x: d.position[0],
        y: d.position[1],
        vx: d.velocity[0],
        vy: d.velocity[1],
        force: contact.at(t),
        phase: d.bounce_phase,
    };
    let mut samples = Vec::with_capacity(steps + 1);
    let mut snapshots = Vec::new();
    samples.push(sample(0.0, &drop));
    let mut termination = Termination::Completed;

    for n in 0..steps {
        let t0 = n as f64 * p.dt;
        let t1 = (n + 1) as f64 * p.dt;
        let force = contact.mean(t0, t1);
        let forcing = DropForcing {
            position: drop.position,
            force,
            kernel_width: p.kernel_width,
        };
        match solver.step(&forcing) {
            Ok(()) => {}
            Err(Error::BlowUp { .. }) => {
                termination = Termination::BlowUp { t: t1 };
                break;
            }
            Err(e) => return Err(e),
        }
        let stepped = step_drop(&drop, |x| solver.sample_slope(x), force, p.dt, &p.drop, &cfg.fluid, t_f);
        drop = match stepped {
            Ok((next, _)) if grid.contains(next.position) => next,
            Ok(_) | Err(Error::OutsideDomain { .. }) => {
                termination = Termination::DomainExit { t: t1 };
                break;
            }
            Err(e) => return Err(e),
        };
        samples.push(sample(t1, &drop));
        if snapshot_steps > 0 && (n + 1) % snapshot_steps == 0 {
            let state = solver.state();
            snapshots.push(Snapshot {
                t: t1,
                drop_position: drop.position,
                eta: state.eta,
                phi: state.phi,
            });
        }
        if cfg.numerics.stop_at_detector && drop.position[1] < landmarks.detector_y {
            termination = Termination::Detector { t: t1 };
            break;
        }
    }

    let launch = p.launch_state();
    Ok(TrajectoryRecord {
        meta: TrajectoryMeta {
            config_hash: crate::io::config::config_hash(cfg),
            seed: cfg.seed,
            variant: cfg.geometry.variant,
            gamma_ratio: cfg.forcing.gamma_ratio(),
            impact_parameter: launch.position[0],
            lambda_f: p.lambda_f,
            faraday_period: t_f,
            dt: p.dt,
            nx: grid.nx,
            ny: grid.ny,
            dx: grid.dx,
            dy: grid.dy,
            kernel_width: p.kernel_width,
            landmarks,
            termination,
            natural_units: false,
            config: Some(*cfg),
        },
        samples,
        snapshots,
    })
}
