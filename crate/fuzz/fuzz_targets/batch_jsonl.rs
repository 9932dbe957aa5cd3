#![no_main]

use haar_modular::io::{batch_to_jsonl, parse_batch_jsonl};
use haar_modular::stats::EmpiricalDist;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(s) = std::str::from_utf8(data) else { return };
    if let Ok(batch) = parse_batch_jsonl(s) {
        assert_eq!(parse_batch_jsonl(&batch_to_jsonl(&batch)).unwrap(), batch);
        let _ = EmpiricalDist::from_batch(&batch);
    }
});
