#![no_main]

use haar_modular::io::{parse_n_list, MAX_DIMENSION, MAX_N_LIST};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(ns) = parse_n_list(s) {
        assert!(!ns.is_empty() && ns.len() <= MAX_N_LIST);
        assert!(ns.iter().all(|&n| (1..=MAX_DIMENSION).contains(&n)));
    }
});
