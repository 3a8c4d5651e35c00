#![no_main]

use libfuzzer_sys::fuzz_target;
use pilotwave::io::config::{config_hash, parse_run_file, serialize_config};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    if let Ok(run) = parse_run_file(text) {
        let sim = run.sim();
        let again = pilotwave::io::config::parse_config(&serialize_config(&sim).unwrap()).unwrap();
        assert_eq!(config_hash(&again), config_hash(&sim));
    }
});
