//! Pseudo-spectral solver for the damped, parametrically forced
//! quasi-potential wave model over variable topography:
//!
//! ```text
//! φ_t = −g(1 + Γ cos ω₀t) η + (σ/ρ)∇²η + 2ν∇²φ − P_d/ρ
//! η_t = −∇·(b ∇φ) + 2ν∇²η
//! ```
//!
//! The viscous terms are integrated exactly with an integrating factor and
//! the remaining terms with classical RK4 (Lawson form). The variable-coefficient
//! divergence is evaluated pseudo-spectrally and truncated with the 2/3 rule.

use std::f64::consts::PI;
use std::ops::Range;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::fft::Fft2;
use crate::grid::Grid;
use crate::params::{FluidParams, ForcingParams, G};
use crate::topography::DepthMap;

/// Blow-up guard: |η| may not exceed this many Faraday wavelengths.
pub const BLOWUP_LAMBDAS: f64 = 1.0e3;

#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    /// Surface elevation (m), row-major on the simulation grid.
    pub eta: Vec<f64>,
    /// Surface velocity potential (m²/s).
    pub phi: Vec<f64>,
    pub t: f64,
}

impl WaveState {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            eta: vec![0.0; grid.len()],
            phi: vec![0.0; grid.len()],
            t: 0.0,
        }
    }

    /// Flat potential with white-noise elevation of RMS `amplitude`.
    pub fn with_noise(grid: &Grid, amplitude: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let eta = (0..grid.len())
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                amplitude * z
            })
            .collect();
        Self {
            eta,
            phi: vec![0.0; grid.len()],
            t: 0.0,
        }
    }

    pub fn mirror_x(&self, grid: &Grid) -> Self {
        Self {
            eta: grid.mirror_field(&self.eta),
            phi: grid.mirror_field(&self.phi),
            t: self.t,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.eta.iter().chain(&self.phi).all(|v| v.is_finite())
    }
}

/// Initial wave state: flat, or seeded with white noise when `noise > 0`.
pub fn init_state(depth: &DepthMap, noise: f64, seed: u64) -> WaveState {
    if noise > 0.0 {
        WaveState::with_noise(&depth.grid, noise, seed)
    } else {
        WaveState::zeros(&depth.grid)
    }
}

/// Pressure source of a bouncing drop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DropForcing {
    pub position: [f64; 2],
    /// Normal force (N), averaged over the step.
    pub force: f64,
    pub kernel_width: f64,
}

impl DropForcing {
    pub fn none() -> Self {
        Self {
            position: [0.0, 0.0],
            force: 0.0,
            kernel_width: 1.0,
        }
    }
}

/// Periodic Gaussian of standard deviation `width` centred on `center`,
/// normalized so that `Σ K·dx·dy = 1`.
pub fn drop_kernel(width: f64, grid: &Grid, center: [f64; 2]) -> Result<Vec<f64>> {
    if !(width >= 2.0 * grid.dx.max(grid.dy)) {
        return Err(Error::InvalidParameter(format!(
            "kernel width {width:e} m must be at least two grid cells"
        )));
    }
    let (lx, ly) = (grid.lx(), grid.ly());
    let wrap = |d: f64, l: f64| d - l * (d / l).round();
    let mut k = Vec::with_capacity(grid.len());
    for j in 0..grid.ny {
        let dy = wrap(grid.y(j) - center[1], ly);
        for i in 0..grid.nx {
            let dx = wrap(grid.x(i) - center[0], lx);
            k.push((-(dx * dx + dy * dy) / (2.0 * width * width)).exp());
        }
    }
    let total: f64 = k.iter().sum::<f64>() * grid.cell_area();
    for v in &mut k {
        *v /= total;
    }
    Ok(k)
}

/// Wavenumber tables, dealiasing mask and integrating factors.
#[derive(Clone)]
pub struct SpectralWorkspace {
    pub grid: Grid,
    /// x-wavenumbers (1/m), length nx.
    pub kx: Vec<f64>,
    /// y-wavenumbers (1/m), length ny.
    pub ky: Vec<f64>,
    /// |k|² in spectral (transposed) layout.
    pub k2: Vec<f64>,
    /// 1 inside the 2/3-rule band, 0 outside.
    pub mask: Vec<f64>,
    /// exp(−2ν_eff k² dt).
    pub decay_full: Vec<f64>,
    /// exp(−ν_eff k² dt).
    pub decay_half: Vec<f64>,
    /// x-mode rows inside the band.
    band_x: Vec<Range<usize>>,
    /// y-mode columns inside the band.
    band_y: Vec<Range<usize>>,
    /// Contiguous spectral index ranges covering the band.
    band: Vec<Range<usize>>,
    fft: Fft2,
}

impl SpectralWorkspace {
    pub fn new(grid: Grid, nu_eff: f64, dt: f64) -> Self {
        let kx = Grid::wavenumbers(grid.nx, grid.lx());
        let ky = Grid::wavenumbers(grid.ny, grid.ly());
        let mx = Grid::mode_numbers(grid.nx);
        let my = Grid::mode_numbers(grid.ny);
        let (cut_x, cut_y) = (grid.nx as i64 / 3, grid.ny as i64 / 3);
        let n = grid.len();
        let mut k2 = Vec::with_capacity(n);
        let mut mask = Vec::with_capacity(n);
        for i in 0..grid.nx {
            for j in 0..grid.ny {
                k2.push(kx[i] * kx[i] + ky[j] * ky[j]);
                let keep = mx[i].abs() <= cut_x && my[j].abs() <= cut_y;
                mask.push(if keep { 1.0 } else { 0.0 });
            }
        }
        let decay_full = k2.iter().map(|k| (-2.0 * nu_eff * k * dt).exp()).collect();
        let decay_half = k2.iter().map(|k| (-nu_eff * k * dt).exp()).collect();
        let band_x = band_ranges(grid.nx);
        let band_y = band_ranges(grid.ny);
        let band = band_x
            .iter()
            .flat_map(|r| r.clone())
            .flat_map(|i| band_y.iter().map(move |c| i * grid.ny + c.start..i * grid.ny + c.end))
            .collect();
        Self {
            grid,
            kx,
            ky,
            k2,
            mask,
            decay_full,
            decay_half,
            band_x,
            band_y,
            band,
            fft: Fft2::new(grid.nx, grid.ny),
        }
    }

}

/// Indices of the modes |m| ≤ n/3 of a length-`n` DFT, as ranges.
fn band_ranges(n: usize) -> Vec<Range<usize>> {
    let cut = n / 3;
    if cut == 0 {
        vec![0..1]
    } else {
        vec![0..cut + 1, n - cut..n]
    }
}

/// Physical coefficients entering the wave equations.
#[derive(Debug, Clone, Copy)]
pub struct WaveModel {
    pub fluid: FluidParams,
    pub forcing: ForcingParams,
    /// Faraday wavelength (m), used only for the blow-up guard.
    pub lambda_f: f64,
}

#[derive(Default)]
struct Stage {
    eta: Vec<Complex64>,
    phi: Vec<Complex64>,
}

impl Stage {
    fn zeros(n: usize) -> Self {
        Self {
            eta: vec![Complex64::default(); n],
            phi: vec![Complex64::default(); n],
        }
    }
}

/// Time stepper owning the spectral state of (η, φ).
pub struct WaveSolver {
    ws: SpectralWorkspace,
    model: WaveModel,
    b: Vec<f64>,
    b_uniform: Option<f64>,
    dt: f64,
    t: f64,
    eta_hat: Vec<Complex64>,
    phi_hat: Vec<Complex64>,
    press: Vec<Complex64>,
    stages: [Stage; 4],
    work: Stage,
    buf_a: Vec<Complex64>,
    buf_b: Vec<Complex64>,
    phase_x: Vec<Complex64>,
    phase_y: Vec<Complex64>,
    corner_cache: Option<(f64, [(usize, usize); 4], [[f64; 7]; 4])>,
    /// Kernel width and its masked Gaussian spectrum.
    envelope: (f64, Vec<f64>),
}

impl WaveSolver {
    /// The initial state is projected onto the 2/3-rule band; only band modes
    /// are evolved.
    pub fn new(state: &WaveState, depth: &DepthMap, model: WaveModel, dt: f64) -> Result<Self> {
        let grid = depth.grid;
        if state.eta.len() != grid.len() || state.phi.len() != grid.len() {
            return Err(Error::InvalidParameter(
                "wave state does not match the depth map grid".into(),
            ));
        }
        let t_f = model.forcing.faraday_period();
        if !(dt > 0.0 && dt <= t_f / 64.0 * (1.0 + 1e-12)) {
            return Err(Error::InvalidParameter(format!(
                "time step {dt:e} s must lie in (0, T_F/64 = {:e}]",
                t_f / 64.0
            )));
        }
        let courant = courant_number(&grid, depth, &model, dt);
        if courant >= 0.5 {
            return Err(Error::InvalidParameter(format!(
                "CFL violated: dt·c_max/dx = {courant:.3} >= 0.5"
            )));
        }

        let ws = SpectralWorkspace::new(grid, model.fluid.nu_eff, dt);
        let n = grid.len();
        let mut solver = Self {
            b: depth.b.clone(),
            b_uniform: depth.is_uniform().then(|| depth.b[0]),
            dt,
            t: state.t,
            eta_hat: vec![Complex64::default(); n],
            phi_hat: vec![Complex64::default(); n],
            press: vec![Complex64::default(); n],
            stages: [Stage::zeros(n), Stage::zeros(n), Stage::zeros(n), Stage::zeros(n)],
            work: Stage::zeros(n),
            buf_a: vec![Complex64::default(); n],
            buf_b: vec![Complex64::default(); n],
            phase_x: vec![Complex64::default(); grid.nx],
            phase_y: vec![Complex64::default(); grid.ny],
            corner_cache: None,
            envelope: (f64::NAN, Vec::new()),
            ws,
            model,
        };
        solver.ws.fft.forward_real(&state.eta, &mut solver.eta_hat);
        solver.ws.fft.forward_real(&state.phi, &mut solver.phi_hat);
        for s in 0..n {
            let m = solver.ws.mask[s];
            solver.eta_hat[s] *= m;
            solver.phi_hat[s] *= m;
        }
        Ok(solver)
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn grid(&self) -> &Grid {
        &self.ws.grid
    }

    pub fn workspace(&self) -> &SpectralWorkspace {
        &self.ws
    }

    #[cfg(test)]
    fn force_general_path(&mut self) {
        self.b_uniform = None;
    }

    pub fn set_gamma(&mut self, gamma: f64) {
        self.model.forcing.gamma = gamma;
    }

    pub fn eta_hat(&self) -> &[Complex64] {
        &self.eta_hat
    }

    pub fn phi_hat(&self) -> &[Complex64] {
        &self.phi_hat
    }

    /// Physical-space state.
    pub fn state(&mut self) -> WaveState {
        let eta = self.ws.fft.inverse_real(&self.eta_hat);
        let phi = self.ws.fft.inverse_real(&self.phi_hat);
        WaveState { eta, phi, t: self.t }
    }

    /// Surface elevation only.
    pub fn eta(&mut self) -> Vec<f64> {
        self.ws.fft.inverse_real(&self.eta_hat)
    }

    /// Advance by one time step.
    pub fn step(&mut self, forcing: &DropForcing) -> Result<()> {
        self.build_pressure(forcing);
        let (t, dt) = (self.t, self.dt);
        let half = 0.5 * dt;
        let mut stages = std::mem::take(&mut self.stages);
        let mut work = std::mem::take(&mut self.work);

        // k1 = N(u, t)
        let u = Stage {
            eta: std::mem::take(&mut self.eta_hat),
            phi: std::mem::take(&mut self.phi_hat),
        };
        self.rhs(&u, t, &mut stages[0]);

        // a = E_h (u + dt/2 k1)
        for s in self.ws.band.iter().flat_map(Clone::clone) {
            let e = self.ws.decay_half[s];
            work.eta[s] = e * (u.eta[s] + half * stages[0].eta[s]);
            work.phi[s] = e * (u.phi[s] + half * stages[0].phi[s]);
        }
        self.rhs(&work, t + half, &mut stages[1]);

        // b = E_h u + dt/2 k2
        for s in self.ws.band.iter().flat_map(Clone::clone) {
            let e = self.ws.decay_half[s];
            work.eta[s] = e * u.eta[s] + half * stages[1].eta[s];
            work.phi[s] = e * u.phi[s] + half * stages[1].phi[s];
        }
        self.rhs(&work, t + half, &mut stages[2]);

        // c = E u + dt E_h k3
        for s in self.ws.band.iter().flat_map(Clone::clone) {
            let (e, eh) = (self.ws.decay_full[s], self.ws.decay_half[s]);
            work.eta[s] = e * u.eta[s] + dt * eh * stages[2].eta[s];
            work.phi[s] = e * u.phi[s] + dt * eh * stages[2].phi[s];
        }
        self.rhs(&work, t + dt, &mut stages[3]);

        let Stage { eta: mut eta_hat, phi: mut phi_hat } = u;
        let sixth = dt / 6.0;
        for s in self.ws.band.iter().flat_map(Clone::clone) {
            let (e, eh) = (self.ws.decay_full[s], self.ws.decay_half[s]);
            eta_hat[s] = e * eta_hat[s]
                + sixth
                    * (e * stages[0].eta[s]
                        + 2.0 * eh * (stages[1].eta[s] + stages[2].eta[s])
                        + stages[3].eta[s]);
            phi_hat[s] = e * phi_hat[s]
                + sixth
                    * (e * stages[0].phi[s]
                        + 2.0 * eh * (stages[1].phi[s] + stages[2].phi[s])
                        + stages[3].phi[s]);
        }
        self.eta_hat = eta_hat;
        self.phi_hat = phi_hat;
        self.stages = stages;
        self.work = work;
        self.t = t + dt;
        self.check_blowup()
    }

    fn check_blowup(&mut self) -> Result<()> {
        let limit = BLOWUP_LAMBDAS * self.model.lambda_f;
        // Σ|η̂|/N bounds max|η|; only transform when the bound trips.
        let bound = self
            .ws
            .band
            .iter()
            .flat_map(|r| &self.eta_hat[r.clone()])
            .map(|c| c.re.abs() + c.im.abs())
            .sum::<f64>()
            / self.eta_hat.len() as f64;
        if bound.is_finite() && bound <= limit {
            return Ok(());
        }
        let max_eta = self
            .eta()
            .iter()
            .fold(0.0_f64, |m, v| if v.is_nan() { f64::NAN } else { m.max(v.abs()) });
        if max_eta.is_nan() || max_eta > limit {
            return Err(Error::BlowUp { t: self.t, max_eta });
        }
        Ok(())
    }

    fn build_pressure(&mut self, forcing: &DropForcing) {
        if forcing.force == 0.0 {
            self.press.iter_mut().for_each(|p| *p = Complex64::default());
            return;
        }
        let grid = self.ws.grid;
        let (x0, y0) = (grid.x(0), grid.y(0));
        for (p, &k) in self.phase_x.iter_mut().zip(&self.ws.kx) {
            *p = Complex64::from_polar(1.0, -k * (forcing.position[0] - x0));
        }
        for (p, &k) in self.phase_y.iter_mut().zip(&self.ws.ky) {
            *p = Complex64::from_polar(1.0, -k * (forcing.position[1] - y0));
        }
        if self.envelope.0 != forcing.kernel_width {
            let w2 = forcing.kernel_width * forcing.kernel_width;
            self.envelope = (
                forcing.kernel_width,
                self.ws
                    .k2
                    .iter()
                    .zip(&self.ws.mask)
                    .map(|(k2, m)| m * (-0.5 * k2 * w2).exp())
                    .collect(),
            );
        }
        let scale = forcing.force / (self.model.fluid.rho * grid.cell_area());
        let ny = grid.ny;
        for rows in &self.ws.band_x {
            for i in rows.clone() {
                let px = scale * self.phase_x[i];
                for cols in &self.ws.band_y {
                    for j in cols.clone() {
                        let s = i * ny + j;
                        self.press[s] = self.envelope.1[s] * (px * self.phase_y[j]);
                    }
                }
            }
        }
    }

    /// Non-viscous right-hand side in spectral space, on the dealiasing band.
    fn rhs(&mut self, u: &Stage, t: f64, out: &mut Stage) {
        let fluid = &self.model.fluid;
        let forcing = &self.model.forcing;
        let g_t = G * (1.0 + forcing.gamma * (forcing.omega0() * t).cos());
        let cap = fluid.capillary();
        for s in self.ws.band.iter().flat_map(Clone::clone) {
            out.phi[s] = -(g_t + cap * self.ws.k2[s]) * u.eta[s] - self.press[s];
        }
        match self.b_uniform {
            Some(b0) => {
                for s in self.ws.band.iter().flat_map(Clone::clone) {
                    out.eta[s] = b0 * self.ws.k2[s] * u.phi[s];
                }
            }
            None => self.divergence_term(&u.phi, &mut out.eta),
        }
    }

    /// −∇·(b∇φ) on the dealiasing band, for φ̂ supported on the band.
    fn divergence_term(&mut self, phi: &[Complex64], out: &mut [Complex64]) {
        let (nx, ny) = (self.ws.grid.nx, self.ws.grid.ny);
        let i_unit = Complex64::new(0.0, 1.0);
        // Pack φ_x + i φ_y into one complex inverse transform.
        self.buf_a.iter_mut().for_each(|z| *z = Complex64::default());
        for rows in &self.ws.band_x {
            for i in rows.clone() {
                let kx = self.ws.kx[i];
                for cols in &self.ws.band_y {
                    for j in cols.clone() {
                        let s = i * ny + j;
                        let p = phi[s];
                        self.buf_a[s] = i_unit * kx * p - self.ws.ky[j] * p;
                    }
                }
            }
        }
        self.ws.fft.inverse_rows(&mut self.buf_a, &mut self.buf_b, &self.ws.band_x);
        for (z, &b) in self.buf_b.iter_mut().zip(&self.b) {
            *z *= b;
        }
        self.ws.fft.forward_rows(&mut self.buf_b, &mut self.buf_a, &self.ws.band_x);
        for rows in &self.ws.band_x {
            for i in rows.clone() {
                let kx = self.ws.kx[i];
                let ic = (nx - i) % nx;
                for cols in &self.ws.band_y {
                    for j in cols.clone() {
                        let s = i * ny + j;
                        let z = self.buf_a[s];
                        let zc = self.buf_a[ic * ny + (ny - j) % ny].conj();
                        let fx = 0.5 * (z + zc);
                        let fy = (z - zc) * Complex64::new(0.0, -0.5);
                        out[s] = -i_unit * (kx * fx + self.ws.ky[j] * fy);
                    }
                }
            }
        }
    }

    /// ½∫[g η² + (σ/ρ)|∇η|² + b|∇φ|²] dA.
    pub fn energy(&mut self) -> f64 {
        let grid = self.ws.grid;
        let n = grid.len() as f64;
        let cap = self.model.fluid.capillary();
        let mut pot = 0.0;
        let mut kin_uniform = 0.0;
        for s in 0..self.eta_hat.len() {
            let k2 = self.ws.k2[s];
            pot += (G + cap * k2) * self.eta_hat[s].norm_sqr();
            kin_uniform += k2 * self.phi_hat[s].norm_sqr();
        }
        let scale = grid.cell_area() / n;
        let kinetic = match self.b_uniform {
            Some(b0) => b0 * kin_uniform * scale,
            None => {
                let ny = grid.ny;
                for i in 0..grid.nx {
                    for j in 0..ny {
                        let s = i * ny + j;
                        let p = self.phi_hat[s];
                        self.buf_a[s] = Complex64::new(0.0, self.ws.kx[i]) * p - self.ws.ky[j] * p;
                    }
                }
                self.ws.fft.inverse(&mut self.buf_a, &mut self.buf_b);
                self.buf_b
                    .iter()
                    .zip(&self.b)
                    .map(|(z, b)| b * z.norm_sqr())
                    .sum::<f64>()
                    * grid.cell_area()
            }
        };
        0.5 * (pot * scale + kinetic)
    }

    /// ∇η at `p` by bicubic Hermite interpolation, evaluating the node
    /// derivatives of the current state only at the four enclosing nodes.
    /// Agrees with [`WaveSolver::slope_field`] up to rounding when η̂ vanishes
    /// outside the dealiasing band.
    pub fn sample_slope(&mut self, p: [f64; 2]) -> Result<[f64; 2]> {
        let grid = self.ws.grid;
        let cell = locate(&grid, p)?;
        let fresh = matches!(&self.corner_cache, Some((t, c, _)) if *t == self.t && *c == cell.corners);
        if !fresh {
            let data = cell.corners.map(|(i, j)| self.node_derivatives(i, j));
            self.corner_cache = Some((self.t, cell.corners, data));
        }
        let data = &self.corner_cache.as_ref().expect("filled above").2;
        Ok(hermite_gradient(data, cell.u, cell.v, grid.dx, grid.dy))
    }

    /// `[ηx, ηy, ηxx, ηyy, ηxy, ηxxy, ηxyy]` at node `(i, j)` from the band-limited
    /// modes, summing each conjugate pair once.
    fn node_derivatives(&self, i: usize, j: usize) -> [f64; 7] {
        let grid = self.ws.grid;
        let (nx, ny) = (grid.nx, grid.ny);
        let (cut_x, cut_y) = (nx / 3, ny / 3);
        let py: Vec<Complex64> = (0..=cut_y)
            .map(|b| Complex64::from_polar(1.0, 2.0 * PI * ((b * j) % ny) as f64 / ny as f64))
            .collect();
        let mut acc = [0.0; 7];
        let rows = (0..=cut_x).chain(nx - cut_x..nx).filter(|&a| a < nx);
        for a in rows {
            let kx = self.ws.kx[a];
            let px = Complex64::from_polar(1.0, 2.0 * PI * ((a * i) % nx) as f64 / nx as f64);
            let row = &self.eta_hat[a * ny..(a + 1) * ny];
            // Modes b and ny−b are conjugate partners of (−a, ∓b), so summing
            // b ∈ [0, cut_y] over every a and doubling b > 0 covers the band.
            let mut t = [Complex64::default(); 3];
            for (b, phase) in py.iter().enumerate() {
                let ky = self.ws.ky[b];
                let w = if b == 0 { 1.0 } else { 2.0 };
                let c = w * row[b] * phase;
                t[0] += c;
                t[1] += ky * c;
                t[2] += ky * ky * c;
            }
            let t = t.map(|c| c * px);
            acc[0] -= kx * t[0].im;
            acc[1] -= t[1].im;
            acc[2] -= kx * kx * t[0].re;
            acc[3] -= t[2].re;
            acc[4] -= kx * t[1].re;
            acc[5] += kx * kx * t[1].im;
            acc[6] += kx * t[2].im;
        }
        let scale = 1.0 / grid.len() as f64;
        acc.map(|v| v * scale)
    }

    /// Gradient of η with the derivatives needed for bicubic Hermite sampling.
    pub fn slope_field(&mut self) -> SlopeField {
        let grid = self.ws.grid;
        let ny = grid.ny;
        let i_unit = Complex64::new(0.0, 1.0);
        let mut pairs: [Vec<Complex64>; 4] = Default::default();
        for p in pairs.iter_mut() {
            *p = vec![Complex64::default(); grid.len()];
        }
        for i in 0..grid.nx {
            let kx = self.ws.kx[i];
            for j in 0..ny {
                let s = i * ny + j;
                let e = self.eta_hat[s];
                let ky = self.ws.ky[j];
                let ex = i_unit * kx * e;
                let ey = i_unit * ky * e;
                let exx = -kx * kx * e;
                let eyy = -ky * ky * e;
                let exy = -kx * ky * e;
                let exxy = -i_unit * kx * kx * ky * e;
                let exyy = -i_unit * kx * ky * ky * e;
                pairs[0][s] = ex + i_unit * ey;
                pairs[1][s] = exx + i_unit * eyy;
                pairs[2][s] = exy + i_unit * exxy;
                pairs[3][s] = exyy;
            }
        }
        let mut out: [Vec<Complex64>; 4] = Default::default();
        for (spec, phys) in pairs.iter_mut().zip(out.iter_mut()) {
            *phys = vec![Complex64::default(); grid.len()];
            self.ws.fft.inverse(spec, phys);
        }
        let re = |v: &[Complex64]| v.iter().map(|c| c.re).collect::<Vec<_>>();
        let im = |v: &[Complex64]| v.iter().map(|c| c.im).collect::<Vec<_>>();
        SlopeField {
            grid,
            ex: re(&out[0]),
            ey: im(&out[0]),
            exx: re(&out[1]),
            eyy: im(&out[1]),
            exy: re(&out[2]),
            exxy: im(&out[2]),
            exyy: re(&out[3]),
        }
    }
}

/// Courant number dt·c_max/min(dx, dy), with c_max the phase speed at the
/// axis Nyquist wavenumber for the deepest effective depth and peak gravity.
pub fn courant_number(grid: &Grid, depth: &DepthMap, model: &WaveModel, dt: f64) -> f64 {
    let h = grid.dx.min(grid.dy);
    let k = PI / h;
    let b_max = depth.b.iter().cloned().fold(0.0, f64::max);
    let g_peak = G * (1.0 + model.forcing.gamma);
    let omega = ((g_peak * k * k + model.fluid.capillary() * k.powi(4)) * b_max).sqrt();
    dt * (omega / k) / h
}

/// Convenience wrapper: advance a physical-space state by one step.
pub fn step_wave(
    state: &WaveState,
    depth: &DepthMap,
    model: WaveModel,
    forcing: &DropForcing,
    dt: f64,
) -> Result<WaveState> {
    let mut solver = WaveSolver::new(state, depth, model, dt)?;
    solver.step(forcing)?;
    Ok(solver.state())
}

/// Wave energy of a physical-space state.
pub fn wave_energy(state: &WaveState, depth: &DepthMap, model: WaveModel) -> Result<f64> {
    let dt = model.forcing.faraday_period() / 64.0;
    // The CFL guard is irrelevant for a diagnostic; bypass it with a tiny step.
    let mut solver = WaveSolver::new(state, depth, model, dt.min(1e-9))?;
    Ok(solver.energy())
}

/// ∇η and its derivatives on the grid, sampled by bicubic Hermite interpolation.
#[derive(Debug, Clone)]
pub struct SlopeField {
    pub grid: Grid,
    pub ex: Vec<f64>,
    pub ey: Vec<f64>,
    pub exx: Vec<f64>,
    pub eyy: Vec<f64>,
    pub exy: Vec<f64>,
    pub exxy: Vec<f64>,
    pub exyy: Vec<f64>,
}

impl SlopeField {
    /// ∇η at `p`.
    pub fn sample(&self, p: [f64; 2]) -> Result<[f64; 2]> {
        let cell = locate(&self.grid, p)?;
        let corners = cell.corners.map(|(i, j)| {
            let s = self.grid.index(i, j);
            [
                self.ex[s], self.ey[s], self.exx[s], self.eyy[s], self.exy[s], self.exxy[s], self.exyy[s],
            ]
        });
        Ok(hermite_gradient(&corners, cell.u, cell.v, self.grid.dx, self.grid.dy))
    }
}

/// Grid cell containing a point and the point's fractional offsets in it.
#[derive(Debug, Clone, Copy)]
struct Cell {
    corners: [(usize, usize); 4],
    u: f64,
    v: f64,
}

fn locate(g: &Grid, p: [f64; 2]) -> Result<Cell> {
    if !(p[0].is_finite() && p[1].is_finite()) || !g.contains(p) {
        return Err(Error::OutsideDomain { x: p[0], y: p[1] });
    }
    let fx = (p[0] + 0.5 * g.lx()) / g.dx - 0.5;
    let fy = (p[1] + 0.5 * g.ly()) / g.dy - 0.5;
    let (fi, fj) = (fx.floor(), fy.floor());
    let i0 = (fi as i64).rem_euclid(g.nx as i64) as usize;
    let j0 = (fj as i64).rem_euclid(g.ny as i64) as usize;
    let i1 = (i0 + 1) % g.nx;
    let j1 = (j0 + 1) % g.ny;
    Ok(Cell {
        corners: [(i0, j0), (i1, j0), (i0, j1), (i1, j1)],
        u: fx - fi,
        v: fy - fj,
    })
}

/// Bicubic Hermite gradient from corner data
/// `[ηx, ηy, ηxx, ηyy, ηxy, ηxxy, ηxyy]` ordered (0,0), (1,0), (0,1), (1,1).
fn hermite_gradient(corners: &[[f64; 7]; 4], u: f64, v: f64, dx: f64, dy: f64) -> [f64; 2] {
    let hu = [hermite_value(u), hermite_slope(u)];
    let hv = [hermite_value(v), hermite_slope(v)];
    let mut gx = 0.0;
    let mut gy = 0.0;
    for (d, (a, c)) in corners.iter().zip([(0, 0), (1, 0), (0, 1), (1, 1)]) {
        let (va, sa) = (hu[0][a], hu[1][a]);
        let (vc, sc) = (hv[0][c], hv[1][c]);
        gx += d[0] * va * vc + dx * d[2] * sa * vc + dy * d[4] * va * sc + dx * dy * d[5] * sa * sc;
        gy += d[1] * va * vc + dx * d[4] * sa * vc + dy * d[3] * va * sc + dx * dy * d[6] * sa * sc;
    }
    [gx, gy]
}

/// Cubic Hermite value basis (H₀, H₁) at `t` in [0, 1].
#[inline]
fn hermite_value(t: f64) -> [f64; 2] {
    let t2 = t * t;
    let t3 = t2 * t;
    [2.0 * t3 - 3.0 * t2 + 1.0, -2.0 * t3 + 3.0 * t2]
}

/// Cubic Hermite slope basis (D₀, D₁) at `t` in [0, 1].
#[inline]
fn hermite_slope(t: f64) -> [f64; 2] {
    let t2 = t * t;
    let t3 = t2 * t;
    [t3 - 2.0 * t2 + t, t3 - t2]
}

/// Sample ∇η of a physical-space state at `p`.
pub fn sample_eta_gradient(state: &WaveState, depth: &DepthMap, model: WaveModel, p: [f64; 2]) -> Result<[f64; 2]> {
    let mut solver = WaveSolver::new(state, depth, model, 1e-9)?;
    solver.slope_field().sample(p)
}
