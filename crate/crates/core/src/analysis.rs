//! Trajectory classification, centreline crossings, walking speed and the
//! ensemble-weighted mean wave field.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::simulation::{Sample, TrajectoryRecord};
use crate::topography::GeometrySpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Expected,
    Surreal,
    Indeterminate,
}

impl Label {
    pub fn name(&self) -> &'static str {
        match self {
            Label::Expected => "expected",
            Label::Surreal => "surreal",
            Label::Indeterminate => "indeterminate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
    None,
}

impl Side {
    pub fn of(x: f64) -> Self {
        if x > 0.0 {
            Side::Right
        } else if x < 0.0 {
            Side::Left
        } else {
            Side::None
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::None => "none",
        }
    }

    pub fn mirror(&self) -> Self {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
            Side::None => Side::None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub t: f64,
    pub y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub label: Label,
    /// First centreline crossing after the reflection.
    pub first_crossing_time: Option<f64>,
    /// Where the velocity component normal to the barrier reversed.
    pub turnaround_point: Option<[f64; 2]>,
    pub reflection_time: Option<f64>,
    pub detector_side: Side,
    /// Centreline crossings over the whole run.
    pub crossings: usize,
}

/// Sign changes of `x − axis_x`, located by linear interpolation.
/// A sample lying exactly on the axis is not a crossing by itself; the
/// event is recorded once the path shows up on the other side.
pub fn detect_crossings(samples: &[Sample], axis_x: f64) -> Result<Vec<Crossing>> {
    if samples.len() < 2 {
        return Err(Error::Validation(format!(
            "crossing detection needs at least 2 samples (got {})",
            samples.len()
        )));
    }
    let mut out = Vec::new();
    let mut side = Side::of(samples[0].x - axis_x);
    for w in samples.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let s = Side::of(b.x - axis_x);
        if s == Side::None {
            continue;
        }
        if side != Side::None && s != side {
            let (da, db) = (a.x - axis_x, b.x - axis_x);
            let f = if da == 0.0 { 0.0 } else { da / (da - db) };
            out.push(Crossing {
                t: a.t + f * (b.t - a.t),
                y: a.y + f * (b.y - a.y),
            });
        }
        side = s;
    }
    Ok(out)
}

/// Labels a run as expected (crosses the centreline after bouncing off a
/// barrier), surreal (reaches the detector line on its own side) or
/// indeterminate.
pub fn classify_trajectory(record: &TrajectoryRecord, geometry: &GeometrySpec) -> Result<Classification> {
    let samples = &record.samples;
    if samples.is_empty() {
        return Err(Error::Validation("cannot classify a trajectory with no samples".into()));
    }
    let lm = &record.meta.landmarks;
    let crossings = if samples.len() >= 2 {
        detect_crossings(samples, 0.0)?
    } else {
        Vec::new()
    };
    let mut out = Classification {
        label: Label::Indeterminate,
        first_crossing_time: None,
        turnaround_point: None,
        reflection_time: None,
        detector_side: Side::None,
        crossings: crossings.len(),
    };
    let launch_side = Side::of(samples[0].x);
    if launch_side == Side::None {
        return Ok(out);
    }

    let Some((reflect_idx, point)) = find_reflection(samples, geometry, lm.reflection_distance) else {
        return Ok(out);
    };
    let t_reflect = samples[reflect_idx].t;
    out.reflection_time = Some(t_reflect);
    out.turnaround_point = Some(point);

    let detector = samples[reflect_idx..]
        .iter()
        .position(|s| s.y < lm.detector_y)
        .map(|k| &samples[reflect_idx + k]);
    let t_detector = detector.map_or(f64::INFINITY, |s| s.t);
    out.detector_side = detector.map_or(Side::None, |s| Side::of(s.x));
    out.first_crossing_time = crossings.iter().map(|c| c.t).find(|&t| t >= t_reflect);

    out.label = match (out.first_crossing_time, detector) {
        (Some(tc), _) if tc <= t_detector => Label::Expected,
        (None, Some(_)) if out.detector_side == launch_side => Label::Surreal,
        _ => Label::Indeterminate,
    };
    Ok(out)
}

/// First approach within `distance` of a barrier, then the first later
/// sample whose velocity points away from that barrier along the normal
/// taken at the approach.
/// Fraction of the speed by which the normal velocity must change sign.
const REVERSAL_MARGIN: f64 = 0.1;

/// First reversal of the velocity normal to a barrier. Each stretch of
/// samples within `distance` of a barrier is judged against the outward
/// normal at its closest approach, so walking past a corner is not a
/// reflection.
fn find_reflection(samples: &[Sample], geometry: &GeometrySpec, distance: f64) -> Option<(usize, [f64; 2])> {
    let barriers: Vec<_> = geometry.barriers().collect();
    let nearest = |p: [f64; 2]| {
        barriers
            .iter()
            .filter(|b| b.distance(p) <= distance)
            .filter_map(|b| {
                let q = b.closest_boundary_point(p)?;
                let d = [p[0] - q[0], p[1] - q[1]];
                let n = d[0].hypot(d[1]);
                (n > 0.0).then_some((n, [d[0] / n, d[1] / n]))
            })
            .min_by(|a, b| a.0.total_cmp(&b.0))
    };
    let near: Vec<_> = samples.iter().map(|s| nearest(s.position())).collect();
    let mut i = 0;
    while i < samples.len() {
        if near[i].is_none() {
            i += 1;
            continue;
        }
        let end = (i..samples.len()).find(|&k| near[k].is_none()).unwrap_or(samples.len());
        let (closest, normal) = (i..end)
            .filter_map(|k| near[k].map(|(d, n)| (k, d, n)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(k, _, n)| (k, n))?;
        let vn = |s: &Sample| (s.vx * normal[0] + s.vy * normal[1]) / s.vx.hypot(s.vy).max(f64::MIN_POSITIVE);
        let approached = samples[i..=closest].iter().any(|s| vn(s) < -REVERSAL_MARGIN);
        if approached {
            if let Some(k) = (closest..end).find(|&k| vn(&samples[k]) > REVERSAL_MARGIN) {
                return Some((k, samples[k].position()));
            }
        }
        i = end;
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpeedStats {
    /// Mean of |V| over the window (m/s).
    pub mean: f64,
    /// Population standard deviation divided by the mean.
    pub rel_std: f64,
}

/// Speed statistics over the trailing `window` seconds of a run.
pub fn walking_speed(samples: &[Sample], window: f64) -> Result<SpeedStats> {
    let (Some(first), Some(last)) = (samples.first(), samples.last()) else {
        return Err(Error::Validation("walking speed of an empty trajectory".into()));
    };
    if !(window > 0.0 && window <= last.t - first.t) {
        return Err(Error::Validation(format!(
            "speed window {window} s is outside the trajectory span {} s",
            last.t - first.t
        )));
    }
    let t0 = last.t - window;
    let speeds: Vec<f64> = samples
        .iter()
        .filter(|s| s.t >= t0)
        .map(|s| s.vx.hypot(s.vy))
        .collect();
    let n = speeds.len() as f64;
    let mean = speeds.iter().sum::<f64>() / n;
    let var = speeds.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Ok(SpeedStats {
        mean,
        rel_std: var.sqrt() / mean,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanField {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
    pub lambda_f: f64,
    pub sigma_b: f64,
    /// Mean elevation (m), row-major `[j * nx + i]`.
    #[serde(skip)]
    pub eta: Vec<f64>,
    /// Normalized weight per record.
    pub weights: Vec<f64>,
    pub impact_parameters: Vec<f64>,
    /// Snapshots entering each record's time average.
    pub snapshots_used: Vec<usize>,
    /// Which part of each run is averaged.
    pub time_window: String,
}

impl MeanField {
    /// Mean elevation in units of the Faraday wavelength.
    pub fn eta_in_lambda(&self) -> Vec<f64> {
        self.eta.iter().map(|v| v / self.lambda_f).collect()
    }
}

/// Gaussian-weighted average over impact parameters of each run's
/// time-averaged elevation. Snapshots taken once the drop is below the
/// splitter are averaged; runs that never get there use all snapshots.
pub fn mean_wave_field(records: &[TrajectoryRecord], sigma_b: f64) -> Result<MeanField> {
    let first = records
        .first()
        .ok_or_else(|| Error::Validation("mean wave field of an empty ensemble".into()))?;
    if !(sigma_b > 0.0) {
        return Err(Error::Validation(format!("sigma_b must be > 0 (got {sigma_b})")));
    }
    let grid = first.grid();
    let n = grid.nx * grid.ny;
    for (i, r) in records.iter().enumerate() {
        if r.grid() != grid {
            return Err(Error::Validation(format!("record {i} is on a different grid")));
        }
        if r.snapshots.is_empty() {
            return Err(Error::Validation(format!("record {i} has no wave snapshots")));
        }
        if let Some(s) = r.snapshots.iter().find(|s| s.eta.len() != n) {
            return Err(Error::Validation(format!(
                "record {i} has a snapshot of {} values on a {}x{} grid",
                s.eta.len(),
                grid.nx,
                grid.ny
            )));
        }
    }

    let raw: Vec<f64> = records
        .iter()
        .map(|r| (-r.meta.impact_parameter.powi(2) / (2.0 * sigma_b * sigma_b)).exp())
        .collect();
    let total: f64 = raw.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Validation("all ensemble weights are zero".into()));
    }
    let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();

    let mut eta = vec![0.0; n];
    let mut snapshots_used = Vec::with_capacity(records.len());
    for (r, &w) in records.iter().zip(&weights) {
        let below = r.meta.landmarks.splitter_bottom_y;
        let post: Vec<_> = r.snapshots.iter().filter(|s| s.drop_position[1] < below).collect();
        let used = if post.is_empty() { r.snapshots.iter().collect() } else { post };
        let scale = w / used.len() as f64;
        for s in &used {
            for (acc, v) in eta.iter_mut().zip(&s.eta) {
                *acc += scale * v;
            }
        }
        snapshots_used.push(used.len());
    }

    Ok(MeanField {
        nx: grid.nx,
        ny: grid.ny,
        dx: grid.dx,
        dy: grid.dy,
        lambda_f: first.meta.lambda_f,
        sigma_b,
        eta,
        weights,
        impact_parameters: records.iter().map(|r| r.meta.impact_parameter).collect(),
        snapshots_used,
        time_window: "snapshots with the drop below the splitter (all snapshots if none)".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::simulation::{Landmarks, Snapshot, Termination, TrajectoryMeta};
    use crate::topography::{essw_geometry, Variant};

    const DT: f64 = 0.01;

    fn samples_from(points: &[(f64, f64)], dt: f64) -> Vec<Sample> {
        let n = points.len();
        (0..n)
            .map(|k| {
                let (a, b) = if k + 1 < n { (k, k + 1) } else { (k.saturating_sub(1), k) };
                Sample {
                    t: k as f64 * dt,
                    x: points[k].0,
                    y: points[k].1,
                    vx: (points[b].0 - points[a].0) / dt,
                    vy: (points[b].1 - points[a].1) / dt,
                    force: 0.0,
                    phase: 0.0,
                }
            })
            .collect()
    }

    /// Polyline through `corners` (λ = 1 units) walked at unit speed.
    fn polyline(corners: &[[f64; 2]], dt: f64) -> Vec<(f64, f64)> {
        let mut pts = vec![(corners[0][0], corners[0][1])];
        for w in corners.windows(2) {
            let (a, b) = (w[0], w[1]);
            let len = (b[0] - a[0]).hypot(b[1] - a[1]);
            let n = (len / dt).round() as usize;
            for k in 1..=n {
                let f = k as f64 / n as f64;
                pts.push((a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1])));
            }
        }
        pts
    }

    fn record(samples: Vec<Sample>, impact_parameter: f64, grid: Grid, snapshots: Vec<Snapshot>) -> TrajectoryRecord {
        TrajectoryRecord {
            meta: TrajectoryMeta {
                config_hash: String::new(),
                seed: 0,
                variant: Variant::TwoBarrier,
                gamma_ratio: 0.905,
                impact_parameter,
                lambda_f: 1.0,
                faraday_period: 1.0,
                dt: DT,
                nx: grid.nx,
                ny: grid.ny,
                dx: grid.dx,
                dy: grid.dy,
                kernel_width: 0.1,
                landmarks: Landmarks {
                    lambda_f: 1.0,
                    splitter_bottom_y: 1.5,
                    barrier_tip_y: -4.5,
                    detector_y: -12.5,
                    reflection_distance: 1.5,
                },
                termination: Termination::Completed,
                natural_units: false,
                config: None,
            },
            samples,
            snapshots,
        }
    }

    fn path(corners: &[[f64; 2]], dt: f64) -> TrajectoryRecord {
        let grid = Grid::new(24, 32, 24.0, 32.0);
        record(samples_from(&polyline(corners, dt), dt), corners[0][0], grid, Vec::new())
    }

    const EXPECTED: [[f64; 2]; 4] = [[3.0, 8.0], [4.0, -1.5], [-3.0, -5.0], [-4.0, -13.5]];
    const SURREAL: [[f64; 2]; 5] = [[3.0, 8.0], [4.0, -1.5], [1.0, -3.0], [2.5, -8.0], [3.0, -14.0]];

    fn mirrored(c: &[[f64; 2]]) -> Vec<[f64; 2]> {
        c.iter().map(|p| [-p[0], p[1]]).collect()
    }

    #[test]
    fn straight_path_crosses_once() {
        let pts: Vec<_> = (0..=100).map(|k| (-1.0 + 0.02 * k as f64, 0.5)).collect();
        let c = detect_crossings(&samples_from(&pts, DT), 0.0).unwrap();
        assert_eq!(c.len(), 1);
        assert!((c[0].t - 0.5).abs() < 1e-12);
        assert!((c[0].y - 0.5).abs() < 1e-12);
    }

    #[test]
    fn path_off_the_axis_has_no_crossings() {
        let pts: Vec<_> = (0..50).map(|k| (0.01 + (k as f64 * 0.3).sin().abs(), k as f64)).collect();
        assert!(detect_crossings(&samples_from(&pts, DT), 0.0).unwrap().is_empty());
        assert!(detect_crossings(&samples_from(&pts[..1], DT), 0.0).is_err());
    }

    #[test]
    fn sine_crossings_match_analytic_zeros() {
        let period = 1.0;
        let shift = 0.1;
        let w = 2.0 * std::f64::consts::PI / period;
        let n = (2.0 * period / DT).round() as usize;
        let pts: Vec<_> = (0..=n).map(|k| (0.3 * (w * (k as f64 * DT - shift)).sin(), 0.0)).collect();
        let c = detect_crossings(&samples_from(&pts, DT), 0.0).unwrap();
        assert_eq!(c.len(), 4);
        for (k, ev) in c.iter().enumerate() {
            let zero = shift + 0.5 * period * k as f64;
            assert!((ev.t - zero).abs() < DT, "{} vs {}", ev.t, zero);
        }
        let mirror: Vec<_> = pts.iter().map(|&(x, y)| (-x, y)).collect();
        let cm = detect_crossings(&samples_from(&mirror, DT), 0.0).unwrap();
        let times: Vec<_> = c.iter().map(|e| e.t).collect();
        let times_m: Vec<_> = cm.iter().map(|e| e.t).collect();
        assert_eq!(times, times_m);
    }

    #[test]
    fn synthetic_expected_and_surreal_paths() {
        let geometry = essw_geometry(1.0, Variant::TwoBarrier);
        let e = classify_trajectory(&path(&EXPECTED, DT), &geometry).unwrap();
        assert_eq!(e.label, Label::Expected);
        assert!(e.first_crossing_time.is_some());
        assert_eq!(e.detector_side, Side::Left);
        assert_eq!(e.crossings, 1);

        let s = classify_trajectory(&path(&SURREAL, DT), &geometry).unwrap();
        assert_eq!(s.label, Label::Surreal);
        assert_eq!(s.first_crossing_time, None);
        assert_eq!(s.detector_side, Side::Right);
        assert_eq!(s.crossings, 0);
        let tp = s.turnaround_point.unwrap();
        assert!(tp[1] < 0.0 && tp[0] > 3.0);
    }

    #[test]
    fn mirrored_paths_get_mirrored_labels() {
        let geometry = essw_geometry(1.0, Variant::TwoBarrier);
        for corners in [&EXPECTED[..], &SURREAL[..]] {
            let a = classify_trajectory(&path(corners, DT), &geometry).unwrap();
            let b = classify_trajectory(&path(&mirrored(corners), DT), &geometry).unwrap();
            assert_eq!(a.label, b.label);
            assert_eq!(a.detector_side, b.detector_side.mirror());
            assert_eq!(a.first_crossing_time.is_some(), b.first_crossing_time.is_some());
        }
    }

    #[test]
    fn labels_survive_doubling_the_sample_rate() {
        let geometry = essw_geometry(1.0, Variant::TwoBarrier);
        for corners in [&EXPECTED[..], &SURREAL[..]] {
            let a = classify_trajectory(&path(corners, DT), &geometry).unwrap();
            let b = classify_trajectory(&path(corners, DT / 2.0), &geometry).unwrap();
            assert_eq!(a.label, b.label);
            assert_eq!(a.detector_side, b.detector_side);
        }
    }

    #[test]
    fn indeterminate_cases() {
        let geometry = essw_geometry(1.0, Variant::TwoBarrier);
        let centre = path(&[[0.0, 8.0], [0.0, -14.0]], DT);
        assert_eq!(classify_trajectory(&centre, &geometry).unwrap().label, Label::Indeterminate);
        // Stops before reaching the detector without crossing.
        let short = path(&SURREAL[..4], DT);
        assert_eq!(classify_trajectory(&short, &geometry).unwrap().label, Label::Indeterminate);
        // Never comes near a barrier.
        let straight = path(&[[2.0, 8.0], [2.0, -14.0]], DT);
        let c = classify_trajectory(&straight, &geometry).unwrap();
        assert_eq!(c.label, Label::Indeterminate);
        assert_eq!(c.reflection_time, None);
        let mut empty = straight;
        empty.samples.clear();
        assert!(classify_trajectory(&empty, &geometry).is_err());
    }

    #[test]
    fn expected_path_needs_the_barrier_only_once() {
        let geometry = essw_geometry(1.0, Variant::RightBarrierOnly);
        assert_eq!(
            classify_trajectory(&path(&EXPECTED, DT), &geometry).unwrap().label,
            Label::Expected
        );
    }

    fn speed_samples(speed: impl Fn(f64) -> f64, n: usize, dt: f64) -> Vec<Sample> {
        (0..n)
            .map(|k| {
                let t = k as f64 * dt;
                Sample {
                    t,
                    x: 0.0,
                    y: 0.0,
                    vx: 0.6 * speed(t),
                    vy: -0.8 * speed(t),
                    force: 0.0,
                    phase: 0.0,
                }
            })
            .collect()
    }

    #[test]
    fn walking_speed_statistics() {
        let uniform = speed_samples(|_| 0.01, 1000, DT);
        let s = walking_speed(&uniform, 5.0).unwrap();
        assert!((s.mean - 0.01).abs() < 1e-15);
        assert!(s.rel_std < 1e-12);

        let ramp = speed_samples(|t| if t < 4.0 { 0.0025 * t } else { 0.01 }, 1000, DT);
        let s = walking_speed(&ramp, 5.0).unwrap();
        assert!((s.mean - 0.01).abs() < 1e-12 * 0.01);

        // 10% sinusoidal modulation over whole periods: RMS = 0.1/√2.
        let n = 10_000;
        let dt = 1e-3;
        let sine = speed_samples(|t| 0.01 * (1.0 + 0.1 * (2.0 * std::f64::consts::PI * t).sin()), n + 1, dt);
        let s = walking_speed(&sine[1..], 9.999).unwrap();
        assert!((s.rel_std - 0.1 / 2f64.sqrt()).abs() < 1e-4, "{}", s.rel_std);

        assert!(walking_speed(&uniform, 100.0).is_err());
        assert!(walking_speed(&uniform, 0.0).is_err());
        assert!(walking_speed(&[], 1.0).is_err());
    }

    fn snapshot(grid: &Grid, f: impl Fn(usize, usize) -> f64, y: f64) -> Snapshot {
        Snapshot {
            t: 0.0,
            drop_position: [0.0, y],
            eta: (0..grid.ny).flat_map(|j| (0..grid.nx).map(move |i| (i, j))).map(|(i, j)| f(i, j)).collect(),
            phi: vec![0.0; grid.nx * grid.ny],
        }
    }

    #[test]
    fn single_record_mean_is_its_time_average() {
        let grid = Grid::new(6, 4, 6.0, 4.0);
        let snaps = vec![
            snapshot(&grid, |i, j| (i + 10 * j) as f64, 0.0),
            snapshot(&grid, |i, j| 3.0 * (i + 10 * j) as f64, 0.0),
            // Still above the splitter: left out of the average.
            snapshot(&grid, |_, _| 1e3, 5.0),
        ];
        let r = record(samples_from(&[(0.3, 0.0), (0.3, 0.0)], DT), 0.3, grid, snaps);
        let m = mean_wave_field(&[r], 1.4).unwrap();
        assert_eq!(m.snapshots_used, vec![2]);
        assert_eq!(m.weights, vec![1.0]);
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let v = 2.0 * (i + 10 * j) as f64;
                assert!((m.eta[j * grid.nx + i] - v).abs() < 1e-12 * v.max(1.0));
            }
        }
        assert_eq!(m.eta_in_lambda(), m.eta);
    }

    #[test]
    fn weights_follow_the_gaussian() {
        let grid = Grid::new(4, 4, 4.0, 4.0);
        let mk = |a: f64| record(Vec::new(), a, grid, vec![snapshot(&grid, |_, _| 1.0, 0.0)]);
        let m = mean_wave_field(&[mk(0.0), mk(1.4)], 1.4).unwrap();
        assert!((m.weights[1] / m.weights[0] - (-0.5f64).exp()).abs() < 1e-15);
        assert!((m.weights[0] + m.weights[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn symmetric_ensemble_gives_symmetric_field_and_scaling_is_exact() {
        let grid = Grid::new(8, 5, 8.0, 5.0);
        let f = |i: usize, j: usize| ((i * 7 + j * 3) % 11) as f64 * 1e-6 + (i as f64).sin() * 1e-7;
        let nx = grid.nx;
        let mk = |a: f64, scale: f64, mirror: bool| {
            let g = move |i: usize, j: usize| scale * if mirror { f(nx - 1 - i, j) } else { f(i, j) };
            record(Vec::new(), a, grid, vec![snapshot(&grid, g, 0.0), snapshot(&grid, move |i, j| 0.5 * g(i, j), 0.0)])
        };
        let m = mean_wave_field(&[mk(0.7, 1.0, false), mk(-0.7, 1.0, true), mk(2.0, 1.0, false), mk(-2.0, 1.0, true)], 1.4).unwrap();
        for j in 0..grid.ny {
            for i in 0..nx {
                let (a, b) = (m.eta[j * nx + i], m.eta[j * nx + nx - 1 - i]);
                assert!((a - b).abs() <= 1e-14 * a.abs().max(1e-6), "{a} {b}");
            }
        }
        let m2 = mean_wave_field(&[mk(0.7, 2.0, false), mk(-0.7, 2.0, true), mk(2.0, 2.0, false), mk(-2.0, 2.0, true)], 1.4).unwrap();
        for (a, b) in m.eta.iter().zip(&m2.eta) {
            assert_eq!(2.0 * a, *b);
        }
    }

    #[test]
    fn mean_field_rejects_bad_ensembles() {
        let grid = Grid::new(4, 4, 4.0, 4.0);
        let other = Grid::new(4, 6, 4.0, 6.0);
        let ok = record(Vec::new(), 0.0, grid, vec![snapshot(&grid, |_, _| 1.0, 0.0)]);
        assert!(mean_wave_field(&[], 1.4).is_err());
        assert!(mean_wave_field(std::slice::from_ref(&ok), 0.0).is_err());
        let bare = record(Vec::new(), 0.0, grid, Vec::new());
        assert!(mean_wave_field(&[ok.clone(), bare], 1.4).is_err());
        let mismatched = record(Vec::new(), 0.0, other, vec![snapshot(&other, |_, _| 1.0, 0.0)]);
        assert!(mean_wave_field(&[ok, mismatched], 1.4).is_err());
        let far = record(Vec::new(), 1e3, grid, vec![snapshot(&grid, |_, _| 1.0, 0.0)]);
        assert!(mean_wave_field(&[far], 1.4).is_err());
    }
}
