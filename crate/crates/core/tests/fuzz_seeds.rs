//! Replays the checked-in fuzz corpus through the same properties the fuzz
//! targets assert, so the seeds stay meaningful on a stable toolchain.

use std::path::PathBuf;

use pilotwave::io::config::{config_hash, parse_config, parse_run_file, serialize_config};
use pilotwave::io::grid::{decode_grid, encode_grid};
use pilotwave::io::trajectory::{decode_samples, encode_samples};
use pilotwave::simulation::TrajectoryMeta;

fn seeds(target: &str) -> Vec<(PathBuf, Vec<u8>)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            let bytes = std::fs::read(&p).unwrap();
            (p, bytes)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn config_seeds() {
    let mut accepted = 0;
    for (path, bytes) in seeds("config_parse") {
        let Ok(text) = std::str::from_utf8(&bytes) else { continue };
        if let Ok(run) = parse_run_file(text) {
            let sim = run.sim();
            let again = parse_config(&serialize_config(&sim).unwrap()).unwrap();
            assert_eq!(config_hash(&again), config_hash(&sim), "{}", path.display());
            accepted += 1;
        }
    }
    assert!(accepted >= 2);
}

#[test]
fn grid_seeds() {
    let mut accepted = 0;
    for (_, bytes) in seeds("grid_decode") {
        if let Ok((header, field)) = decode_grid(&bytes) {
            assert_eq!(encode_grid(&field, &header).unwrap(), bytes);
            accepted += 1;
        }
    }
    assert!(accepted >= 1);
}

#[test]
fn trajectory_seeds() {
    let mut csv = 0;
    let mut json = 0;
    for (_, bytes) in seeds("trajectory_decode") {
        if serde_json::from_slice::<TrajectoryMeta>(&bytes).is_ok() {
            json += 1;
        }
        if let Ok(samples) = decode_samples(&bytes) {
            assert_eq!(decode_samples(&encode_samples(&samples).unwrap()).unwrap(), samples);
            csv += 1;
        }
    }
    assert!(csv >= 2 && json >= 1, "{csv} {json}");
}
