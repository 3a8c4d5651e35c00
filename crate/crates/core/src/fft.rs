//! Two-dimensional complex FFT on row-major grids.
//!
//! Spectra are kept in *transposed* layout (`spec[i * ny + j]` for x-mode `i`,
//! y-mode `j`) so a forward/inverse pair needs one transpose each way instead
//! of two.

use std::ops::Range;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub struct Fft2 {
    nx: usize,
    ny: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
    scratch: Vec<Complex64>,
}

impl Clone for Fft2 {
    fn clone(&self) -> Self {
        Self {
            nx: self.nx,
            ny: self.ny,
            row_fwd: Arc::clone(&self.row_fwd),
            row_inv: Arc::clone(&self.row_inv),
            col_fwd: Arc::clone(&self.col_fwd),
            col_inv: Arc::clone(&self.col_inv),
            scratch: self.scratch.clone(),
        }
    }
}

impl Fft2 {
    pub fn new(nx: usize, ny: usize) -> Self {
        let mut planner = FftPlanner::new();
        let row_fwd = planner.plan_fft_forward(nx);
        let row_inv = planner.plan_fft_inverse(nx);
        let col_fwd = planner.plan_fft_forward(ny);
        let col_inv = planner.plan_fft_inverse(ny);
        let scratch_len = [&row_fwd, &row_inv, &col_fwd, &col_inv]
            .iter()
            .map(|f| f.get_inplace_scratch_len())
            .max()
            .unwrap_or(0);
        Self {
            nx,
            ny,
            row_fwd,
            row_inv,
            col_fwd,
            col_inv,
            scratch: vec![Complex64::default(); scratch_len],
        }
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Forward transform. `phys` (row-major, clobbered) → `spec` (transposed).
    pub fn forward(&mut self, phys: &mut [Complex64], spec: &mut [Complex64]) {
        self.forward_rows(phys, spec, &[0..self.nx]);
    }

    /// Forward transform that only finishes the x-modes in `rows`; the other
    /// entries of `spec` are left unspecified.
    pub fn forward_rows(&mut self, phys: &mut [Complex64], spec: &mut [Complex64], rows: &[Range<usize>]) {
        debug_assert_eq!(phys.len(), self.len());
        self.row_fwd.process_with_scratch(phys, &mut self.scratch);
        transpose::transpose(phys, spec, self.nx, self.ny);
        for r in rows {
            let block = &mut spec[r.start * self.ny..r.end * self.ny];
            self.col_fwd.process_with_scratch(block, &mut self.scratch);
        }
    }

    /// Inverse transform including the 1/N factor.
    /// `spec` (transposed, clobbered) → `phys` (row-major).
    pub fn inverse(&mut self, spec: &mut [Complex64], phys: &mut [Complex64]) {
        self.inverse_rows(spec, phys, &[0..self.nx]);
    }

    /// Inverse transform of a spectrum that vanishes outside the x-modes in `rows`.
    pub fn inverse_rows(&mut self, spec: &mut [Complex64], phys: &mut [Complex64], rows: &[Range<usize>]) {
        debug_assert_eq!(spec.len(), self.len());
        let scale = 1.0 / self.len() as f64;
        for r in rows {
            let block = &mut spec[r.start * self.ny..r.end * self.ny];
            self.col_inv.process_with_scratch(block, &mut self.scratch);
            for v in block.iter_mut() {
                *v *= scale;
            }
        }
        transpose::transpose(spec, phys, self.ny, self.nx);
        self.row_inv.process_with_scratch(phys, &mut self.scratch);
    }

    /// Forward transform of a real field.
    pub fn forward_real(&mut self, field: &[f64], spec: &mut [Complex64]) {
        let mut buf: Vec<Complex64> = field.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward(&mut buf, spec);
    }

    /// Inverse transform keeping the real part.
    pub fn inverse_real(&mut self, spec: &[Complex64]) -> Vec<f64> {
        let mut s = spec.to_vec();
        let mut phys = vec![Complex64::default(); self.len()];
        self.inverse(&mut s, &mut phys);
        phys.into_iter().map(|c| c.re).collect()
    }
}
