#![no_main]

use haar_modular::io::{matrix_to_json, parse_matrix_json};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(m) = parse_matrix_json(s) {
        assert_eq!(parse_matrix_json(&matrix_to_json(&m)).unwrap(), m);
        if m.is_square() && m.rows() <= 8 {
            let _ = m.determinant();
        }
    }
});
