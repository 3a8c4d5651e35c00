#![no_main]

use libfuzzer_sys::fuzz_target;
use pilotwave::io::grid::{decode_grid, encode_grid};

fuzz_target!(|data: &[u8]| {
    if let Ok((header, field)) = decode_grid(data) {
        if field.iter().all(|v| v.is_finite()) {
            assert_eq!(encode_grid(&field, &header).unwrap(), data);
        }
    }
});
