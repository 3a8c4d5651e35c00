#![no_main]

use libfuzzer_sys::fuzz_target;
use pilotwave::io::trajectory::{decode_samples, encode_samples};
use pilotwave::simulation::TrajectoryMeta;

fuzz_target!(|data: &[u8]| {
    // Sidecar JSON and CSV body are both untrusted input.
    let _ = serde_json::from_slice::<TrajectoryMeta>(data);
    if let Ok(samples) = decode_samples(data) {
        let bytes = encode_samples(&samples).unwrap();
        let again = decode_samples(&bytes).unwrap();
        assert_eq!(samples.len(), again.len());
        for (a, b) in samples.iter().zip(&again) {
            assert_eq!(a.t.to_bits(), b.t.to_bits());
            assert_eq!(a.x.to_bits(), b.x.to_bits());
            assert_eq!(a.phase.to_bits(), b.phase.to_bits());
        }
    }
});
