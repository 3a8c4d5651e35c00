//! Bohmian trajectories for superpositions of free Gaussian packets in two
//! dimensions, in natural units (ħ = m = 1).

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::simulation::{Landmarks, Sample, Termination, TrajectoryMeta, TrajectoryRecord};
use crate::topography::Variant;

/// Smallest substep before a trajectory is declared stuck at a node.
pub const DT_MIN: f64 = 1e-9;
/// Below this |ψ| the guidance field is undefined.
pub const PSI_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPacket {
    pub x0: [f64; 2],
    /// Group velocity.
    pub v0: [f64; 2],
    /// Initial width (standard deviation of |ψ|² along each axis).
    pub s0: f64,
    pub amplitude: Complex64,
}

impl GaussianPacket {
    /// Complex width s(t) = s0 (1 + i t / (2 s0²)).
    fn width(&self, t: f64) -> Complex64 {
        self.s0 * Complex64::new(1.0, t / (2.0 * self.s0 * self.s0))
    }

    /// Real spreading width s0 √(1 + (t / 2s0²)²).
    pub fn spread(&self, t: f64) -> f64 {
        self.width(t).norm()
    }

    pub fn center(&self, t: f64) -> [f64; 2] {
        [self.x0[0] + self.v0[0] * t, self.x0[1] + self.v0[1] * t]
    }

    /// ψ, its gradient factor g = ∇ψ/ψ and 1/(2 s0 s(t)).
    fn eval(&self, x: [f64; 2], t: f64) -> (Complex64, [Complex64; 2], Complex64) {
        let st = self.width(t);
        let inv = 1.0 / (2.0 * self.s0 * st);
        let c = self.center(t);
        let d = [x[0] - c[0], x[1] - c[1]];
        let v2 = self.v0[0] * self.v0[0] + self.v0[1] * self.v0[1];
        let phase = self.v0[0] * (x[0] - self.x0[0]) + self.v0[1] * (x[1] - self.x0[1]) - 0.5 * v2 * t;
        let norm = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * self.s0);
        let psi = self.amplitude * norm * (self.s0 / st)
            * (-(d[0] * d[0] + d[1] * d[1]) * inv * 0.5 + Complex64::new(0.0, phase)).exp();
        let i = Complex64::new(0.0, 1.0);
        let g = [-d[0] * inv + i * self.v0[0], -d[1] * inv + i * self.v0[1]];
        (psi, g, inv)
    }

    fn validate(&self) -> Result<()> {
        let finite = self.x0.iter().chain(&self.v0).all(|v| v.is_finite())
            && self.amplitude.re.is_finite()
            && self.amplitude.im.is_finite();
        if !(finite && self.s0 > 0.0 && self.s0.is_finite()) {
            return Err(Error::Validation(format!("invalid Gaussian packet {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Superposition {
    pub packets: Vec<GaussianPacket>,
}

/// ψ with its first three derivatives at one point.
struct Local {
    psi: Complex64,
    grad: [Complex64; 2],
    hess: [[Complex64; 2]; 2],
    lap: Complex64,
    /// ∇(∇²ψ).
    grad_lap: [Complex64; 2],
}

impl Superposition {
    pub fn new(packets: Vec<GaussianPacket>) -> Result<Self> {
        if packets.is_empty() {
            return Err(Error::Validation("a superposition needs at least one packet".into()));
        }
        for p in &packets {
            p.validate()?;
        }
        Ok(Self { packets })
    }

    fn local(&self, x: [f64; 2], t: f64) -> Result<Local> {
        if !(t >= 0.0) {
            return Err(Error::Validation(format!("wave function evaluated at t = {t} < 0")));
        }
        let mut out = Local {
            psi: Complex64::default(),
            grad: [Complex64::default(); 2],
            hess: [[Complex64::default(); 2]; 2],
            lap: Complex64::default(),
            grad_lap: [Complex64::default(); 2],
        };
        // Per packet the exponent is quadratic with Hessian −inv·I, so every
        // derivative is a polynomial in g times ψ.
        for p in &self.packets {
            let (psi, g, inv) = p.eval(x, t);
            let gg = g[0] * g[0] + g[1] * g[1];
            out.psi += psi;
            for a in 0..2 {
                out.grad[a] += psi * g[a];
                for b in 0..2 {
                    let delta = if a == b { inv } else { Complex64::default() };
                    out.hess[a][b] += psi * (g[a] * g[b] - delta);
                }
                out.grad_lap[a] += psi * g[a] * (gg - 4.0 * inv);
            }
            out.lap += psi * (gg - 2.0 * inv);
        }
        Ok(out)
    }

    fn off_node(&self, x: [f64; 2], t: f64) -> Result<Local> {
        let l = self.local(x, t)?;
        if !(l.psi.norm() > PSI_FLOOR) {
            return Err(Error::Nodal { x: x[0], y: x[1], t });
        }
        Ok(l)
    }

    pub fn psi(&self, x: [f64; 2], t: f64) -> Result<Complex64> {
        Ok(self.local(x, t)?.psi)
    }

    /// Analytic ∇ψ.
    pub fn gradient(&self, x: [f64; 2], t: f64) -> Result<[Complex64; 2]> {
        Ok(self.local(x, t)?.grad)
    }

    /// Im(∇ψ/ψ).
    pub fn guidance_velocity(&self, x: [f64; 2], t: f64) -> Result<[f64; 2]> {
        let l = self.off_node(x, t)?;
        Ok([(l.grad[0] / l.psi).im, (l.grad[1] / l.psi).im])
    }

    /// Q = −½ ∇²|ψ| / |ψ|, from ∇²|ψ|/|ψ| = Re(∇²ψ/ψ) + |Im(∇ψ/ψ)|².
    pub fn quantum_potential(&self, x: [f64; 2], t: f64) -> Result<f64> {
        let l = self.off_node(x, t)?;
        let v = [(l.grad[0] / l.psi).im, (l.grad[1] / l.psi).im];
        Ok(-0.5 * ((l.lap / l.psi).re + v[0] * v[0] + v[1] * v[1]))
    }

    /// Analytic ∇Q. With w = Im(∇ψ/ψ),
    /// ∂_c Q = −½ [Re(∂_c∇²ψ/ψ − ∇²ψ ∂_cψ/ψ²) + 2 Σ_a w_a Im(∂_a∂_cψ/ψ − ∂_aψ ∂_cψ/ψ²)].
    pub fn quantum_potential_gradient(&self, x: [f64; 2], t: f64) -> Result<[f64; 2]> {
        let l = self.off_node(x, t)?;
        let inv = 1.0 / l.psi;
        let g = [l.grad[0] * inv, l.grad[1] * inv];
        let w = [g[0].im, g[1].im];
        let mut out = [0.0; 2];
        for (c, o) in out.iter_mut().enumerate() {
            let lap_term = (l.grad_lap[c] * inv - l.lap * inv * g[c]).re;
            let vel_term: f64 = (0..2).map(|a| w[a] * (l.hess[a][c] * inv - g[a] * g[c]).im).sum();
            *o = -0.5 * (lap_term + 2.0 * vel_term);
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BohmPath {
    pub t: Vec<f64>,
    pub x: Vec<[f64; 2]>,
    pub v: Vec<[f64; 2]>,
}

impl BohmPath {
    pub fn min_x(&self) -> f64 {
        self.x.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min)
    }
}

/// Local error target of the step-doubling control (natural length units).
const STEP_TOL: f64 = 1e-10;

fn rk4(sup: &Superposition, x: [f64; 2], t: f64, h: f64) -> Result<[f64; 2]> {
    let add = |a: [f64; 2], b: [f64; 2], s: f64| [a[0] + s * b[0], a[1] + s * b[1]];
    let k1 = sup.guidance_velocity(x, t)?;
    let k2 = sup.guidance_velocity(add(x, k1, 0.5 * h), t + 0.5 * h)?;
    let k3 = sup.guidance_velocity(add(x, k2, 0.5 * h), t + 0.5 * h)?;
    let k4 = sup.guidance_velocity(add(x, k3, h), t + h)?;
    Ok([
        x[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        x[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
    ])
}

/// RK4 on dX/dt = Im(∇ψ/ψ), recorded every `dt`. Each interval is covered
/// by step doubling; a step is halved when the two estimates disagree or a
/// stage lands on a node.
pub fn integrate_trajectory(sup: &Superposition, x0: [f64; 2], t_span: (f64, f64), dt: f64) -> Result<BohmPath> {
    let (t0, t1) = t_span;
    if !(dt > 0.0 && t1 > t0 && t0 >= 0.0) {
        return Err(Error::Validation(format!(
            "invalid time span ({t0}, {t1}) or step {dt}"
        )));
    }
    let steps = ((t1 - t0) / dt).round() as usize;
    let mut path = BohmPath {
        t: Vec::with_capacity(steps + 1),
        x: Vec::with_capacity(steps + 1),
        v: Vec::with_capacity(steps + 1),
    };
    let mut x = x0;
    path.t.push(t0);
    path.x.push(x);
    path.v.push(sup.guidance_velocity(x, t0)?);
    let mut h = dt;
    for n in 0..steps {
        let mut t = t0 + n as f64 * dt;
        let t_end = t0 + (n + 1) as f64 * dt;
        while t < t_end {
            h = h.min(t_end - t);
            let trial = rk4(sup, x, t, h).and_then(|full| {
                let mid = rk4(sup, x, t, 0.5 * h)?;
                let half = rk4(sup, mid, t + 0.5 * h, 0.5 * h)?;
                Ok((full, half))
            });
            match trial {
                Ok((full, half)) if (full[0] - half[0]).hypot(full[1] - half[1]) <= STEP_TOL => {
                    // Richardson extrapolation of the two estimates.
                    x = [
                        half[0] + (half[0] - full[0]) / 15.0,
                        half[1] + (half[1] - full[1]) / 15.0,
                    ];
                    t = if t + h >= t_end { t_end } else { t + h };
                    h = (2.0 * h).min(dt);
                }
                Ok(_) | Err(Error::Nodal { .. }) => {
                    h *= 0.5;
                    if h < DT_MIN {
                        return Err(Error::NodeProximity { t, dt_min: DT_MIN });
                    }
                }
                Err(e) => return Err(e),
            }
        }
        path.t.push(t_end);
        path.x.push(x);
        path.v.push(sup.guidance_velocity(x, t_end)?);
    }
    Ok(path)
}

/// Two equal packets converging symmetrically onto the y axis while moving
/// in −y, mirror images of each other about x = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EsswScenario {
    pub width: f64,
    /// Angle of each packet's velocity from the −y axis (degrees).
    pub half_angle_deg: f64,
    pub speed: f64,
    /// Time at which the two packet centres meet on the axis.
    pub meeting_time: f64,
    /// End of the integration window.
    pub duration: f64,
    pub dt: f64,
    pub trajectories: usize,
    pub seed: u64,
}

impl Default for EsswScenario {
    fn default() -> Self {
        Self {
            width: 1.0,
            half_angle_deg: 45.0,
            speed: 5.0,
            meeting_time: 4.0,
            duration: 8.0,
            dt: 1e-3,
            trajectories: 100,
            seed: 7,
        }
    }
}

impl EsswScenario {
    pub fn superposition(&self) -> Result<Superposition> {
        let a = self.half_angle_deg.to_radians();
        let (vx, vy) = (self.speed * a.sin(), -self.speed * a.cos());
        let d = vx * self.meeting_time;
        let y0 = -vy * self.meeting_time;
        let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Superposition::new(vec![
            GaussianPacket {
                x0: [d, y0],
                v0: [-vx, vy],
                s0: self.width,
                amplitude: amp,
            },
            GaussianPacket {
                x0: [-d, y0],
                v0: [vx, vy],
                s0: self.width,
                amplitude: amp,
            },
        ])
    }

    /// Starting points drawn from |ψ₊|² and kept on the x > 0 side.
    pub fn launch_points(&self) -> Result<Vec<[f64; 2]>> {
        let sup = self.superposition()?;
        let c = sup.packets[0].x0;
        let normal = Normal::new(0.0, self.width)
            .map_err(|e| Error::Validation(format!("packet width: {e}")))?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut out = Vec::with_capacity(self.trajectories);
        while out.len() < self.trajectories {
            let p = [c[0] + normal.sample(&mut rng), c[1] + normal.sample(&mut rng)];
            if p[0] > 0.0 {
                out.push(p);
            }
        }
        Ok(out)
    }

    pub fn run(&self) -> Result<Vec<BohmPath>> {
        let sup = self.superposition()?;
        self.launch_points()?
            .into_iter()
            .map(|x0| integrate_trajectory(&sup, x0, (0.0, self.duration), self.dt))
            .collect()
    }
}

/// A path in the hydrodynamic record layout, flagged as natural units. The
/// wave-field and droplet entries are zero.
pub fn path_record(path: &BohmPath, scenario: &EsswScenario, impact_parameter: f64) -> TrajectoryRecord {
    let json = serde_json::to_string(scenario).expect("scenario serializes");
    let samples = path
        .t
        .iter()
        .zip(&path.x)
        .zip(&path.v)
        .map(|((&t, x), v)| Sample {
            t,
            x: x[0],
            y: x[1],
            vx: v[0],
            vy: v[1],
            force: 0.0,
            phase: 0.0,
        })
        .collect();
    TrajectoryRecord {
        meta: TrajectoryMeta {
            config_hash: hex::encode(Sha256::digest(json.as_bytes())),
            seed: scenario.seed,
            variant: Variant::TwoBarrier,
            gamma_ratio: 0.0,
            impact_parameter,
            lambda_f: scenario.width,
            faraday_period: 0.0,
            dt: scenario.dt,
            nx: 0,
            ny: 0,
            dx: 0.0,
            dy: 0.0,
            kernel_width: 0.0,
            landmarks: Landmarks {
                lambda_f: scenario.width,
                splitter_bottom_y: 0.0,
                barrier_tip_y: 0.0,
                detector_y: 0.0,
                reflection_distance: 0.0,
            },
            termination: Termination::Completed,
            natural_units: true,
            config: None,
        },
        samples,
        snapshots: Vec::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn packet(x0: [f64; 2], v0: [f64; 2], s0: f64) -> GaussianPacket {
        GaussianPacket {
            x0,
            v0,
            s0,
            amplitude: Complex64::new(1.0, 0.0),
        }
    }

    fn single(p: GaussianPacket) -> Superposition {
        Superposition::new(vec![p]).unwrap()
    }

    #[test]
    fn packet_peaks_at_its_centre() {
        let s = single(packet([0.3, -0.2], [1.0, 0.5], 0.8));
        let peak = s.psi([0.3, -0.2], 0.0).unwrap().norm();
        for i in -20..=20 {
            for j in -20..=20 {
                let x = [0.3 + 0.1 * i as f64, -0.2 + 0.1 * j as f64];
                assert!(s.psi(x, 0.0).unwrap().norm() <= peak);
            }
        }
        assert!(s.psi([0.0, 0.0], -1.0).is_err());
    }

    #[test]
    fn norm_is_the_squared_amplitude() {
        let mut p = packet([0.5, 0.0], [0.7, -0.3], 1.0);
        p.amplitude = Complex64::new(0.6, -0.8) * 1.5;
        let s = single(p);
        for t in [0.0, 1.5] {
            let (h, n) = (0.05, 400);
            let mut sum = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let x = [-10.0 + (i as f64 + 0.5) * h, -10.0 + (j as f64 + 0.5) * h];
                    let c = p.center(t);
                    sum += s.psi([x[0] + c[0], x[1] + c[1]], t).unwrap().norm_sqr();
                }
            }
            sum *= h * h;
            assert!((sum - 2.25).abs() < 1e-6 * 2.25, "t = {t}: {sum}");
        }
    }

    fn essw() -> Superposition {
        EsswScenario::default().superposition().unwrap()
    }

    #[test]
    fn symmetric_pair_is_even_in_x() {
        let s = essw();
        for &(x, y, t) in &[(0.7, 10.0, 1.0), (2.3, 3.0, 3.9), (0.01, 0.5, 4.2)] {
            assert_eq!(s.psi([x, y], t).unwrap(), s.psi([-x, y], t).unwrap());
        }
        for &(y, t) in &[(5.0, 3.0), (0.0, 4.0), (-2.0, 4.5)] {
            let v = s.guidance_velocity([0.0, y], t).unwrap();
            assert!(v[0].abs() < 1e-12, "{v:?}");
        }
    }

    #[test]
    fn centre_of_a_packet_moves_with_the_group_velocity() {
        let p = packet([1.0, 2.0], [0.3, -1.1], 0.9);
        let s = single(p);
        for t in [0.0, 0.7, 3.0] {
            let v = s.guidance_velocity(p.center(t), t).unwrap();
            assert!((v[0] - 0.3).abs() < 1e-12 && (v[1] + 1.1).abs() < 1e-12, "{v:?}");
        }
        let path = integrate_trajectory(&s, p.x0, (0.0, 2.0), 0.01).unwrap();
        for (t, x) in path.t.iter().zip(&path.x) {
            let c = p.center(*t);
            assert!((x[0] - c[0]).abs() < 1e-9 && (x[1] - c[1]).abs() < 1e-9);
        }
    }

    #[test]
    fn analytic_gradient_matches_finite_differences() {
        let s = essw();
        let h = 1e-5;
        for &(x, y, t) in &[(1.3, 12.0, 1.0), (0.4, 0.8, 3.7), (-2.0, -1.0, 5.0)] {
            let g = s.gradient([x, y], t).unwrap();
            let fx = (s.psi([x + h, y], t).unwrap() - s.psi([x - h, y], t).unwrap()) / (2.0 * h);
            let fy = (s.psi([x, y + h], t).unwrap() - s.psi([x, y - h], t).unwrap()) / (2.0 * h);
            let scale = g[0].norm().max(g[1].norm());
            assert!((g[0] - fx).norm() < 1e-6 * scale, "{:?} {:?}", g[0], fx);
            assert!((g[1] - fy).norm() < 1e-6 * scale);
        }
    }

    #[test]
    fn quantum_potential_of_a_single_packet() {
        // At t = 0, |ψ| ∝ exp(−r²/4s0²) so Q = (1/2s0²)(1 − r²/4s0²) · ½ in 2-D.
        let s0 = 0.7;
        let s = single(packet([0.0, 0.0], [0.4, 0.0], s0));
        for &(x, y) in &[(0.0, 0.0), (0.5, -0.2), (1.1, 0.9)] {
            let q = s.quantum_potential([x, y], 0.0).unwrap();
            let r2 = x * x + y * y;
            let closed = (2.0 - r2 / (2.0 * s0 * s0)) / (4.0 * s0 * s0);
            assert!((q - closed).abs() < 1e-10, "{q} vs {closed}");
            // Finite differences of |ψ|.
            let h = 1e-3;
            let m = |dx: f64, dy: f64| s.psi([x + dx, y + dy], 0.0).unwrap().norm();
            let lap = (m(h, 0.0) + m(-h, 0.0) + m(0.0, h) + m(0.0, -h) - 4.0 * m(0.0, 0.0)) / (h * h);
            let fd = -0.5 * lap / m(0.0, 0.0);
            assert!((q - fd).abs() < 1e-6, "{q} vs {fd}");
        }
    }

    #[test]
    fn quantum_potential_gradient_is_exact() {
        let s0 = 0.7;
        let s = single(packet([0.0, 0.0], [0.4, 0.0], s0));
        for &(x, y) in &[(0.0, 0.0), (0.5, -0.2), (1.1, 0.9)] {
            let g = s.quantum_potential_gradient([x, y], 0.0).unwrap();
            let k = -1.0 / (4.0 * s0.powi(4));
            assert!((g[0] - k * x).abs() < 1e-12 && (g[1] - k * y).abs() < 1e-12, "{g:?}");
        }
        // Interference region of the converging pair, against differences of Q.
        let s = essw();
        let h = 1e-4;
        for &(x, y, t) in &[(0.3, 0.2, 3.5), (1.2, -0.4, 4.0), (0.05, 1.0, 4.6), (2.0, 3.0, 1.0)] {
            let g = s.quantum_potential_gradient([x, y], t).unwrap();
            for a in 0..2 {
                let at = |k: f64| {
                    let mut p = [x, y];
                    p[a] += k * h;
                    s.quantum_potential(p, t).unwrap()
                };
                let fd = (8.0 * (at(1.0) - at(-1.0)) - (at(2.0) - at(-2.0))) / (12.0 * h);
                assert!((g[a] - fd).abs() < 1e-6 * g[a].abs().max(1.0), "{a}: {} vs {fd}", g[a]);
            }
        }
    }

    #[test]
    fn quantum_potential_ignores_amplitude_and_stays_finite_far_out() {
        let p = packet([0.0, 0.0], [0.0, 1.0], 1.0);
        let mut scaled = p;
        scaled.amplitude = Complex64::new(-3.0, 2.0);
        for x in [[0.3, 0.1], [1.0, -2.0]] {
            let a = single(p).quantum_potential(x, 0.5).unwrap();
            let b = single(scaled).quantum_potential(x, 0.5).unwrap();
            assert!((a - b).abs() < 1e-12 * a.abs().max(1.0));
        }
        let s = essw();
        for k in 0..20 {
            let r = 5.0 + 0.01 * k as f64;
            let q = s.quantum_potential([14.142 + r, 14.142], 0.0).unwrap();
            assert!(q.is_finite());
        }
    }

    #[test]
    fn offset_trajectory_follows_the_spreading_law() {
        let s0 = 1.0;
        let p = packet([0.0, 0.0], [0.0, 0.0], s0);
        let s = single(p);
        let path = integrate_trajectory(&s, [s0, 0.0], (0.0, 4.0), 0.01).unwrap();
        for (t, x) in path.t.iter().zip(&path.x) {
            let ratio = x[0] / s0;
            let expect = p.spread(*t) / s0;
            assert!((ratio - expect).abs() < 1e-6, "t = {t}: {ratio} vs {expect}");
            assert!(x[1].abs() < 1e-12);
        }
    }

    #[test]
    fn translation_moves_the_trajectory_rigidly() {
        let base = essw();
        let shift = [3.0, -1.5];
        let moved = Superposition::new(
            base.packets
                .iter()
                .map(|p| GaussianPacket {
                    x0: [p.x0[0] + shift[0], p.x0[1] + shift[1]],
                    ..*p
                })
                .collect(),
        )
        .unwrap();
        let x0 = [14.5, 13.8];
        let a = integrate_trajectory(&base, x0, (0.0, 6.0), 0.01).unwrap();
        let b = integrate_trajectory(&moved, [x0[0] + shift[0], x0[1] + shift[1]], (0.0, 6.0), 0.01).unwrap();
        for (p, q) in a.x.iter().zip(&b.x) {
            assert!((q[0] - p[0] - shift[0]).abs() < 1e-8 && (q[1] - p[1] - shift[1]).abs() < 1e-8);
        }
    }

    #[test]
    fn essw_trajectory_turns_around_on_its_own_side() {
        let sc = EsswScenario::default();
        let sup = sc.superposition().unwrap();
        let x0 = sup.packets[0].x0;
        let path = integrate_trajectory(&sup, x0, (0.0, sc.duration), 0.01).unwrap();
        assert!(path.min_x() > 0.0);
        // Heads toward the axis first, then away from it.
        assert!(path.v[0][0] < 0.0);
        assert!(path.v.last().unwrap()[0] > 0.0);
    }

    #[test]
    fn node_proximity_and_bad_input_are_errors() {
        assert!(Superposition::new(Vec::new()).is_err());
        assert!(Superposition::new(vec![packet([0.0, 0.0], [0.0, 0.0], 0.0)]).is_err());
        // Two opposite packets cancel exactly on the axis.
        let mut minus = packet([-1.0, 0.0], [0.0, 0.0], 1.0);
        minus.amplitude = Complex64::new(-1.0, 0.0);
        let s = Superposition::new(vec![packet([1.0, 0.0], [0.0, 0.0], 1.0), minus]).unwrap();
        assert!(matches!(s.guidance_velocity([0.0, 0.3], 0.0), Err(Error::Nodal { .. })));
        let s1 = single(packet([0.0, 0.0], [1.0, 0.0], 1.0));
        assert!(integrate_trajectory(&s1, [0.0, 0.0], (0.0, 1.0), 0.0).is_err());
        assert!(integrate_trajectory(&s1, [0.0, 0.0], (1.0, 0.5), 0.1).is_err());
    }
}
