use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::simulation::{Sample, TrajectoryMeta, TrajectoryRecord};

use super::write_atomic;

pub const TRAJECTORY_HEADER: [&str; 7] = ["t_s", "x_m", "y_m", "vx_mps", "vy_mps", "F_N", "phase"];

/// Metadata lives next to the CSV with a `.json` extension.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

/// 17 significant digits: enough for an exact f64 round trip.
fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn encode_samples(samples: &[Sample]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Error::TrajectoryFormat(e.to_string());
    w.write_record(TRAJECTORY_HEADER).map_err(err)?;
    for s in samples {
        w.write_record([s.t, s.x, s.y, s.vx, s.vy, s.force, s.phase].map(fmt))
            .map_err(err)?;
    }
    w.into_inner().map_err(|e| Error::TrajectoryFormat(e.to_string()))
}

pub fn decode_samples(bytes: &[u8]) -> Result<Vec<Sample>> {
    let mut r = csv::Reader::from_reader(bytes);
    let header = r
        .headers()
        .map_err(|e| Error::TrajectoryFormat(e.to_string()))?;
    if header.iter().ne(TRAJECTORY_HEADER) {
        return Err(Error::TrajectoryFormat(format!(
            "unexpected header {:?}",
            header.iter().collect::<Vec<_>>()
        )));
    }
    let mut out = Vec::new();
    for (n, row) in r.records().enumerate() {
        let row = row.map_err(|e| Error::TrajectoryFormat(e.to_string()))?;
        let mut v = [0.0; 7];
        for (slot, field) in v.iter_mut().zip(row.iter()) {
            *slot = field.trim().parse().map_err(|e| {
                Error::TrajectoryFormat(format!("row {}: {field:?}: {e}", n + 1))
            })?;
        }
        out.push(Sample {
            t: v[0],
            x: v[1],
            y: v[2],
            vx: v[3],
            vy: v[4],
            force: v[5],
            phase: v[6],
        });
    }
    Ok(out)
}

/// Writes the samples as CSV and the metadata as a JSON sidecar. Wave
/// snapshots are not part of this format.
pub fn write_trajectory(record: &TrajectoryRecord, path: &Path) -> Result<()> {
    write_atomic(path, &encode_samples(&record.samples)?)?;
    let meta = serde_json::to_vec_pretty(&record.meta)
        .map_err(|e| Error::TrajectoryFormat(format!("metadata: {e}")))?;
    write_atomic(&sidecar_path(path), &meta)
}

pub fn read_trajectory(path: &Path) -> Result<TrajectoryRecord> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let samples = decode_samples(&bytes).map_err(|e| with_path(e, path))?;
    let side = sidecar_path(path);
    let meta_bytes = std::fs::read(&side).map_err(|e| Error::io(&side, e))?;
    let meta: TrajectoryMeta = serde_json::from_slice(&meta_bytes)
        .map_err(|e| Error::TrajectoryFormat(format!("{}: {e}", side.display())))?;
    Ok(TrajectoryRecord {
        meta,
        samples,
        snapshots: Vec::new(),
    })
}

fn with_path(e: Error, path: &Path) -> Error {
    match e {
        Error::TrajectoryFormat(m) => Error::TrajectoryFormat(format!("{}: {m}", path.display())),
        other => other,
    }
}
