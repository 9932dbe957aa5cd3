#![no_main]

use haar_modular::counting::tv_to_uniform;
use haar_modular::io::{exact_dist_to_json, parse_exact_dist_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(d) = parse_exact_dist_json(s) {
        assert_eq!(parse_exact_dist_json(&exact_dist_to_json(&d)).unwrap(), d);
        let _ = tv_to_uniform(&d);
    }
});
