#![no_main]

use haar_modular::io::{parse_ring_json, ring_to_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(ring) = parse_ring_json(s) {
        assert_eq!(parse_ring_json(&ring_to_json(&ring)).unwrap(), ring);
    }
});
