use serde::{Deserialize, Serialize};

/// A periodic, cell-centred grid on `[-Lx/2, Lx/2) × [-Ly/2, Ly/2)`.
///
/// Nodes sit at `x_i = (i + 1/2)·dx − Lx/2`, so the reflection `x → −x`
/// maps node `i` onto node `nx − 1 − i`. Fields are stored row-major with
/// `y` as the slow index: `field[j * nx + i]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
}

impl Grid {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Self {
        Self {
            nx,
            ny,
            dx: lx / nx as f64,
            dy: ly / ny as f64,
        }
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn lx(&self) -> f64 {
        self.nx as f64 * self.dx
    }

    pub fn ly(&self) -> f64 {
        self.ny as f64 * self.dy
    }

    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }

    #[inline]
    pub fn x(&self, i: usize) -> f64 {
        (2.0 * i as f64 + 1.0 - self.nx as f64) * 0.5 * self.dx
    }

    #[inline]
    pub fn y(&self, j: usize) -> f64 {
        (2.0 * j as f64 + 1.0 - self.ny as f64) * 0.5 * self.dy
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        let (hx, hy) = (0.5 * self.lx(), 0.5 * self.ly());
        p[0] >= -hx && p[0] < hx && p[1] >= -hy && p[1] < hy
    }

    /// Reflect a field about `x = 0`.
    pub fn mirror_field(&self, field: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; field.len()];
        for j in 0..self.ny {
            let row = &field[j * self.nx..(j + 1) * self.nx];
            for (i, v) in row.iter().enumerate() {
                out[j * self.nx + (self.nx - 1 - i)] = *v;
            }
        }
        out
    }

    /// Signed angular wavenumbers of a length-`n` DFT over length `l`.
    /// The Nyquist entry (even `n`) is set to zero for derivative operators.
    pub fn wavenumbers(n: usize, l: f64) -> Vec<f64> {
        let base = 2.0 * std::f64::consts::PI / l;
        (0..n)
            .map(|m| {
                if 2 * m == n {
                    0.0
                } else if m < n.div_ceil(2) {
                    m as f64 * base
                } else {
                    (m as f64 - n as f64) * base
                }
            })
            .collect()
    }

    /// Signed integer mode numbers of a length-`n` DFT.
    pub fn mode_numbers(n: usize) -> Vec<i64> {
        (0..n)
            .map(|m| {
                if m <= n / 2 {
                    m as i64
                } else {
                    m as i64 - n as i64
                }
            })
            .collect()
    }
}
