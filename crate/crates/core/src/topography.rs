//! Bathymetry of the beam-splitter table: polygon regions of reduced depth,
//! rasterized to a smooth depth field and the effective-depth coefficient
//! the wave model uses.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::params::effective_depth_b;

/// Sub-samples per cell edge used for area-weighted polygon coverage.
const SUPERSAMPLE: usize = 4;
/// Gaussian smoothing kernel is truncated at this many standard deviations.
const SMOOTHING_CUTOFF: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    Splitter,
    Barrier,
    Wall,
    #[default]
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub name: String,
    #[serde(default)]
    pub kind: RegionKind,
    /// Vertices in metres, in order.
    pub polygon: Vec<[f64; 2]>,
    /// Water depth over the region (m).
    pub depth: f64,
}

impl Region {
    pub fn contains(&self, p: [f64; 2]) -> bool {
        point_in_polygon(&self.polygon, p)
    }

    pub fn bounding_box(&self) -> ([f64; 2], [f64; 2]) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.polygon {
            for a in 0..2 {
                lo[a] = lo[a].min(v[a]);
                hi[a] = hi[a].max(v[a]);
            }
        }
        (lo, hi)
    }

    pub fn centroid(&self) -> [f64; 2] {
        let n = self.polygon.len() as f64;
        let (sx, sy) = self
            .polygon
            .iter()
            .fold((0.0, 0.0), |(sx, sy), v| (sx + v[0], sy + v[1]));
        [sx / n, sy / n]
    }

    /// Euclidean distance from `p` to the region (0 inside).
    pub fn distance(&self, p: [f64; 2]) -> f64 {
        if self.contains(p) {
            return 0.0;
        }
        self.closest_boundary_point(p)
            .map(|q| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt())
            .unwrap_or(f64::INFINITY)
    }

    pub fn closest_boundary_point(&self, p: [f64; 2]) -> Option<[f64; 2]> {
        let n = self.polygon.len();
        (0..n)
            .map(|e| closest_on_segment(self.polygon[e], self.polygon[(e + 1) % n], p))
            .min_by(|a, b| {
                let da = (p[0] - a[0]).powi(2) + (p[1] - a[1]).powi(2);
                let db = (p[0] - b[0]).powi(2) + (p[1] - b[1]).powi(2);
                da.total_cmp(&db)
            })
    }

    fn is_simple(&self) -> bool {
        let n = self.polygon.len();
        if n < 3 {
            return false;
        }
        for a in 0..n {
            for b in a + 1..n {
                // adjacent edges share a vertex
                if b == a + 1 || (a == 0 && b == n - 1) {
                    continue;
                }
                let (p1, p2) = (self.polygon[a], self.polygon[(a + 1) % n]);
                let (q1, q2) = (self.polygon[b], self.polygon[(b + 1) % n]);
                if segments_intersect(p1, p2, q1, q2) {
                    return false;
                }
            }
        }
        true
    }

    pub fn mirror_x(&self) -> Self {
        // Vertex order is kept so every edge maps to its exact reflection.
        let polygon = self.polygon.iter().map(|v| [0.0 - v[0], v[1]]).collect();
        Self {
            name: mirror_name(&self.name),
            kind: self.kind,
            polygon,
            depth: self.depth,
        }
    }
}

fn mirror_name(name: &str) -> String {
    if let Some(rest) = name.strip_prefix("left") {
        format!("right{rest}")
    } else if let Some(rest) = name.strip_prefix("right") {
        format!("left{rest}")
    } else {
        name.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    TwoBarrier,
    RightBarrierOnly,
    LeftBarrierOnly,
    OpenBath,
}

impl Variant {
    pub fn name(&self) -> &'static str {
        match self {
            Variant::TwoBarrier => "two_barrier",
            Variant::RightBarrierOnly => "right_barrier_only",
            Variant::LeftBarrierOnly => "left_barrier_only",
            Variant::OpenBath => "open_bath",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        [
            Variant::TwoBarrier,
            Variant::RightBarrierOnly,
            Variant::LeftBarrierOnly,
            Variant::OpenBath,
        ]
        .into_iter()
        .find(|v| v.name() == s)
    }

    fn barriers(&self) -> (bool, bool) {
        match self {
            Variant::TwoBarrier => (true, true),
            Variant::RightBarrierOnly => (false, true),
            Variant::LeftBarrierOnly => (true, false),
            Variant::OpenBath => (false, false),
        }
    }

    pub fn mirror(&self) -> Self {
        match self {
            Variant::RightBarrierOnly => Variant::LeftBarrierOnly,
            Variant::LeftBarrierOnly => Variant::RightBarrierOnly,
            v => *v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometrySpec {
    /// Later regions override earlier ones where they overlap.
    pub regions: Vec<Region>,
    pub ambient_depth: f64,
    /// (Lx, Ly) in metres; the domain is centred on the origin.
    pub domain_size: [f64; 2],
    pub has_left_barrier: bool,
    pub has_right_barrier: bool,
}

impl GeometrySpec {
    pub fn open(ambient_depth: f64, domain_size: [f64; 2]) -> Self {
        Self {
            regions: Vec::new(),
            ambient_depth,
            domain_size,
            has_left_barrier: false,
            has_right_barrier: false,
        }
    }

    pub fn barriers(&self) -> impl Iterator<Item = &Region> {
        self.regions.iter().filter(|r| r.kind == RegionKind::Barrier)
    }

    pub fn splitter(&self) -> Option<&Region> {
        self.regions.iter().find(|r| r.kind == RegionKind::Splitter)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ambient_depth > 0.0) {
            return Err(Error::Geometry(format!(
                "ambient depth must be > 0 (got {})",
                self.ambient_depth
            )));
        }
        let [lx, ly] = self.domain_size;
        if !(lx > 0.0 && ly > 0.0) {
            return Err(Error::Geometry(format!(
                "domain size must be positive (got {lx} x {ly})"
            )));
        }
        for r in &self.regions {
            if !(r.depth > 0.0) {
                return Err(Error::Geometry(format!(
                    "region '{}' has non-positive depth {}",
                    r.name, r.depth
                )));
            }
            if !r.is_simple() {
                return Err(Error::Geometry(format!(
                    "region '{}' is not a simple polygon",
                    r.name
                )));
            }
            for v in &r.polygon {
                if !(v[0].abs() <= 0.5 * lx && v[1].abs() <= 0.5 * ly) {
                    return Err(Error::Geometry(format!(
                        "region '{}' vertex ({}, {}) lies outside the domain",
                        r.name, v[0], v[1]
                    )));
                }
            }
        }
        Ok(())
    }

    /// Reflect about the centreline `x = 0`.
    pub fn mirror_x(&self) -> Self {
        Self {
            regions: self.regions.iter().map(Region::mirror_x).collect(),
            ambient_depth: self.ambient_depth,
            domain_size: self.domain_size,
            has_left_barrier: self.has_right_barrier,
            has_right_barrier: self.has_left_barrier,
        }
    }

    /// Region-by-region equality ignoring list order, names and vertex order.
    pub fn same_regions(&self, other: &Self) -> bool {
        if self.regions.len() != other.regions.len()
            || self.ambient_depth != other.ambient_depth
            || self.domain_size != other.domain_size
        {
            return false;
        }
        let mut used = vec![false; other.regions.len()];
        'outer: for a in &self.regions {
            for (k, b) in other.regions.iter().enumerate() {
                if !used[k] && a.kind == b.kind && a.depth == b.depth && same_vertex_set(a, b) {
                    used[k] = true;
                    continue 'outer;
                }
            }
            return false;
        }
        true
    }
}

fn same_vertex_set(a: &Region, b: &Region) -> bool {
    let key = |v: &[f64; 2]| (v[0].to_bits(), v[1].to_bits());
    let mut va: Vec<_> = a.polygon.iter().map(key).collect();
    let mut vb: Vec<_> = b.polygon.iter().map(key).collect();
    va.sort_unstable();
    vb.sort_unstable();
    va == vb
}

/// Dimensions of the default table, in units of the Faraday wavelength
/// (except `barrier_depth`, in metres).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EsswLayout {
    pub domain: [f64; 2],
    pub splitter_half_width: f64,
    pub splitter_half_height: f64,
    pub splitter_center_y: f64,
    pub barrier_width: f64,
    pub barrier_length: f64,
    /// Angle of the barrier axis from the vertical (degrees); positive leans
    /// the upper end away from the centreline.
    pub barrier_tilt_deg: f64,
    /// Lateral offset of the inner (lower) barrier tip from the centreline.
    pub barrier_offset_x: f64,
    /// Vertical distance from the splitter's lower tip down to the barrier tips.
    pub barrier_drop_y: f64,
    pub corridor_width: f64,
    pub corridor_length: f64,
    /// Gap between the splitter's upper tip and the corridor mouth.
    pub corridor_gap: f64,
    pub wall_thickness: f64,
    pub walls: bool,
    pub barrier_depth: f64,
}

impl Default for EsswLayout {
    fn default() -> Self {
        Self {
            domain: [16.0, 20.0],
            splitter_half_width: 1.0,
            splitter_half_height: 1.5,
            splitter_center_y: 3.0,
            barrier_width: 1.0,
            barrier_length: 4.5,
            barrier_tilt_deg: 0.0,
            barrier_offset_x: 3.0,
            barrier_drop_y: 4.0,
            corridor_width: 2.0,
            corridor_length: 3.0,
            corridor_gap: 0.5,
            wall_thickness: 1.0,
            walls: true,
            barrier_depth: 0.6e-3,
        }
    }
}

impl EsswLayout {
    /// Upper tip of the splitter (λ units).
    pub fn splitter_top(&self) -> f64 {
        self.splitter_center_y + self.splitter_half_height
    }

    pub fn splitter_bottom(&self) -> f64 {
        self.splitter_center_y - self.splitter_half_height
    }

    pub fn barrier_tip_y(&self) -> f64 {
        self.splitter_bottom() - self.barrier_drop_y
    }

    /// Default launch height: the middle of the corridor (λ units).
    pub fn launch_y(&self) -> f64 {
        self.splitter_top() + self.corridor_gap + 0.5 * self.corridor_length
    }

    pub fn build(&self, lambda_f: f64, variant: Variant, ambient_depth: f64) -> GeometrySpec {
        let s = |v: [f64; 2]| [v[0] * lambda_f, v[1] * lambda_f];
        let mirror = |poly: &[[f64; 2]]| -> Vec<[f64; 2]> {
            poly.iter().map(|v| [0.0 - v[0], v[1]]).collect()
        };
        let depth = self.barrier_depth;
        let mut regions = Vec::new();

        if self.walls {
            let x0 = 0.5 * self.corridor_width;
            let x1 = x0 + self.wall_thickness;
            let y0 = self.splitter_top() + self.corridor_gap;
            let y1 = y0 + self.corridor_length;
            let right: Vec<_> = [[x0, y0], [x1, y0], [x1, y1], [x0, y1]]
                .into_iter()
                .map(s)
                .collect();
            regions.push(Region {
                name: "left_wall".into(),
                kind: RegionKind::Wall,
                polygon: mirror(&right),
                depth,
            });
            regions.push(Region {
                name: "right_wall".into(),
                kind: RegionKind::Wall,
                polygon: right,
                depth,
            });
        }

        if variant != Variant::OpenBath {
            let (hw, hh, cy) = (
                self.splitter_half_width,
                self.splitter_half_height,
                self.splitter_center_y,
            );
            // Symmetric by construction: the two lateral vertices are exact negatives.
            regions.push(Region {
                name: "splitter".into(),
                kind: RegionKind::Splitter,
                polygon: [[0.0, cy - hh], [hw, cy], [0.0, cy + hh], [-hw, cy]]
                    .into_iter()
                    .map(s)
                    .collect(),
                depth,
            });
        }

        let (left, right) = variant.barriers();
        let right_barrier = self.right_barrier(lambda_f);
        if left {
            regions.push(Region {
                name: "left_barrier".into(),
                kind: RegionKind::Barrier,
                polygon: mirror(&right_barrier),
                depth,
            });
        }
        if right {
            regions.push(Region {
                name: "right_barrier".into(),
                kind: RegionKind::Barrier,
                polygon: right_barrier,
                depth,
            });
        }

        GeometrySpec {
            regions,
            ambient_depth,
            domain_size: [self.domain[0] * lambda_f, self.domain[1] * lambda_f],
            has_left_barrier: left,
            has_right_barrier: right,
        }
    }

    /// Rectangle whose axis starts at the inner tip and runs up and (for a
    /// positive tilt) outward.
    fn right_barrier(&self, lambda_f: f64) -> Vec<[f64; 2]> {
        let tilt = self.barrier_tilt_deg.to_radians();
        let axis = [tilt.sin(), tilt.cos()];
        let normal = [axis[1], -axis[0]];
        let tip = [self.barrier_offset_x, self.barrier_tip_y()];
        let (l, hw) = (self.barrier_length, 0.5 * self.barrier_width);
        let end = [tip[0] + l * axis[0], tip[1] + l * axis[1]];
        [
            [tip[0] - hw * normal[0], tip[1] - hw * normal[1]],
            [tip[0] + hw * normal[0], tip[1] + hw * normal[1]],
            [end[0] + hw * normal[0], end[1] + hw * normal[1]],
            [end[0] - hw * normal[0], end[1] - hw * normal[1]],
        ]
        .into_iter()
        .map(|v| [v[0] * lambda_f, v[1] * lambda_f])
        .collect()
    }
}

/// Default beam-splitter table for a given Faraday wavelength.
pub fn essw_geometry(lambda_f: f64, variant: Variant) -> GeometrySpec {
    EsswLayout::default().build(lambda_f, variant, crate::params::FluidParams::default().h0)
}

/// Rasterized bathymetry on the simulation grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap {
    pub grid: Grid,
    /// Depth (m).
    pub h: Vec<f64>,
    /// Effective depth tanh(k_F h)/k_F (m).
    pub b: Vec<f64>,
    pub smoothing_width: f64,
    pub k_f: f64,
    pub ambient_depth: f64,
}

impl DepthMap {
    /// Constant-depth bath.
    pub fn uniform(grid: Grid, depth: f64, k_f: f64) -> Self {
        let n = grid.len();
        Self {
            grid,
            h: vec![depth; n],
            b: vec![effective_depth_b(depth, k_f); n],
            smoothing_width: 0.0,
            k_f,
            ambient_depth: depth,
        }
    }

    pub fn is_uniform(&self) -> bool {
        self.b.iter().all(|&v| v == self.b[0])
    }

    pub fn mirror_x(&self) -> Self {
        Self {
            grid: self.grid,
            h: self.grid.mirror_field(&self.h),
            b: self.grid.mirror_field(&self.b),
            smoothing_width: self.smoothing_width,
            k_f: self.k_f,
            ambient_depth: self.ambient_depth,
        }
    }

    /// Bilinear sample of the depth at `p` (periodic).
    pub fn sample_h(&self, p: [f64; 2]) -> f64 {
        let g = &self.grid;
        let fx = (p[0] + 0.5 * g.lx()) / g.dx - 0.5;
        let fy = (p[1] + 0.5 * g.ly()) / g.dy - 0.5;
        let (i0, j0) = (fx.floor(), fy.floor());
        let (tx, ty) = (fx - i0, fy - j0);
        let wrap = |v: f64, n: usize| (v as i64).rem_euclid(n as i64) as usize;
        let (i0, j0) = (wrap(i0, g.nx), wrap(j0, g.ny));
        let (i1, j1) = ((i0 + 1) % g.nx, (j0 + 1) % g.ny);
        let h = |i, j| self.h[g.index(i, j)];
        (1.0 - ty) * ((1.0 - tx) * h(i0, j0) + tx * h(i1, j0))
            + ty * ((1.0 - tx) * h(i0, j1) + tx * h(i1, j1))
    }

    /// Number of cells shallower than half the ambient depth.
    pub fn shallow_cells(&self) -> usize {
        self.h.iter().filter(|&&h| h < 0.5 * self.ambient_depth).count()
    }
}

/// Rasterize `spec` onto an `nx × ny` grid: area-weighted polygon coverage,
/// Gaussian smoothing with σ = λ_F/8, then the pointwise effective depth.
pub fn rasterize_depth(spec: &GeometrySpec, nx: usize, ny: usize, k_f: f64) -> Result<DepthMap> {
    spec.validate()?;
    if nx == 0 || ny == 0 {
        return Err(Error::Geometry(format!("empty grid {nx} x {ny}")));
    }
    let grid = Grid::new(nx, ny, spec.domain_size[0], spec.domain_size[1]);
    let lambda_f = 2.0 * std::f64::consts::PI / k_f;
    let limit = lambda_f / 8.0;
    let dmax = grid.dx.max(grid.dy);
    if dmax > limit * (1.0 + 1e-9) {
        return Err(Error::UnderResolved { dx: dmax, limit });
    }

    let boxes: Vec<_> = spec.regions.iter().map(Region::bounding_box).collect();
    let offsets: Vec<f64> = (0..SUPERSAMPLE)
        .map(|s| (s as f64 + 0.5) / SUPERSAMPLE as f64 - 0.5)
        .collect();
    let samples = (SUPERSAMPLE * SUPERSAMPLE) as f64;

    let mut h = vec![spec.ambient_depth; grid.len()];
    for j in 0..ny {
        for i in 0..nx {
            let (xc, yc) = (grid.x(i), grid.y(j));
            let cell_lo = [xc - 0.5 * grid.dx, yc - 0.5 * grid.dy];
            let cell_hi = [xc + 0.5 * grid.dx, yc + 0.5 * grid.dy];
            let touching: Vec<usize> = boxes
                .iter()
                .enumerate()
                .filter(|(_, (lo, hi))| {
                    lo[0] <= cell_hi[0] && hi[0] >= cell_lo[0] && lo[1] <= cell_hi[1] && hi[1] >= cell_lo[1]
                })
                .map(|(k, _)| k)
                .collect();
            if touching.is_empty() {
                continue;
            }
            let depth_at = |p: [f64; 2]| {
                touching
                    .iter()
                    .rev()
                    .map(|&k| &spec.regions[k])
                    .find(|r| r.contains(p))
                    .map_or(spec.ambient_depth, |r| r.depth)
            };
            // Pair each x offset with its negative so a mirrored cell adds the
            // same terms in the same order.
            let mut acc = 0.0;
            for oy in &offsets {
                let y = yc + oy * grid.dy;
                for ox in &offsets[..SUPERSAMPLE / 2] {
                    acc += depth_at([xc + ox * grid.dx, y]) + depth_at([xc - ox * grid.dx, y]);
                }
            }
            h[grid.index(i, j)] = acc / samples;
        }
    }

    let smoothing_width = lambda_f / 8.0;
    if !spec.regions.is_empty() {
        h = gaussian_smooth(&h, &grid, smoothing_width);
    }
    let b = h.iter().map(|&d| effective_depth_b(d, k_f)).collect();
    Ok(DepthMap {
        grid,
        h,
        b,
        smoothing_width,
        k_f,
        ambient_depth: spec.ambient_depth,
    })
}

fn gaussian_weights(sigma_cells: f64) -> Vec<f64> {
    let radius = (SMOOTHING_CUTOFF * sigma_cells).ceil() as usize;
    let w: Vec<f64> = (0..=radius)
        .map(|k| (-0.5 * (k as f64 / sigma_cells).powi(2)).exp())
        .collect();
    let total = w[0] + 2.0 * w[1..].iter().sum::<f64>();
    w.into_iter().map(|v| v / total).collect()
}

/// Periodic separable Gaussian blur. Each output sums `w_k·(f[i+k] + f[i−k])`
/// so the result is bitwise mirror-equivariant.
fn gaussian_smooth(field: &[f64], grid: &Grid, sigma: f64) -> Vec<f64> {
    let (nx, ny) = (grid.nx, grid.ny);
    let wx = gaussian_weights(sigma / grid.dx);
    let wy = gaussian_weights(sigma / grid.dy);
    let mut tmp = vec![0.0; field.len()];
    for j in 0..ny {
        let row = &field[j * nx..(j + 1) * nx];
        for i in 0..nx {
            let mut acc = wx[0] * row[i];
            for (k, w) in wx.iter().enumerate().skip(1) {
                let (a, b) = ((i + k) % nx, (i + nx * k - k) % nx);
                acc += w * (row[a] + row[b]);
            }
            tmp[j * nx + i] = acc;
        }
    }
    let mut out = vec![0.0; field.len()];
    for j in 0..ny {
        for i in 0..nx {
            let mut acc = wy[0] * tmp[j * nx + i];
            for (k, w) in wy.iter().enumerate().skip(1) {
                let (a, b) = ((j + k) % ny, (j + ny * k - k) % ny);
                acc += w * (tmp[a * nx + i] + tmp[b * nx + i]);
            }
            out[j * nx + i] = acc;
        }
    }
    out
}

/// Boundary-inclusive crossing-number test, written so that reflecting both
/// the point and the polygon about `x = 0` never changes the answer.
pub fn point_in_polygon(poly: &[[f64; 2]], p: [f64; 2]) -> bool {
    let n = poly.len();
    let mut right = 0usize;
    for e in 0..n {
        let (a, b) = (poly[e], poly[(e + 1) % n]);
        // Orient every edge bottom-up so the rounding does not depend on winding.
        let (a, b) = if a[1] <= b[1] { (a, b) } else { (b, a) };
        let cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
        if cross == 0.0
            && p[0] >= a[0].min(b[0])
            && p[0] <= a[0].max(b[0])
            && p[1] >= a[1].min(b[1])
            && p[1] <= a[1].max(b[1])
        {
            return true;
        }
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x_int = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if x_int == p[0] {
                return true;
            }
            if x_int > p[0] {
                right += 1;
            }
        }
    }
    right % 2 == 1
}

fn closest_on_segment(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> [f64; 2] {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len2 = d[0] * d[0] + d[1] * d[1];
    if len2 == 0.0 {
        return a;
    }
    let t = (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / len2).clamp(0.0, 1.0);
    [a[0] + t * d[0], a[1] + t * d[1]]
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn segments_intersect(p1: [f64; 2], p2: [f64; 2], q1: [f64; 2], q2: [f64; 2]) -> bool {
    let (d1, d2) = (orient(q1, q2, p1), orient(q1, q2, p2));
    let (d3, d4) = (orient(p1, p2, q1), orient(p1, p2, q2));
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}
