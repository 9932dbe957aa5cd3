//! Replays the checked-in fuzz seeds through the parsers with the same
//! round-trip assertions the fuzz targets make.

use std::fs;
use std::path::PathBuf;

use haar_modular::io::{
    batch_to_jsonl, exact_dist_to_json, matrix_to_json, parse_batch_jsonl, parse_exact_dist_json,
    parse_matrix_json, parse_n_list, parse_ring_json, ring_to_json,
};
use haar_modular::rings::{Ring, RingDescriptor};

fn seeds(target: &str) -> Vec<(String, String)> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fuzz/corpus")
        .join(target);
    let mut out: Vec<(String, String)> = fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let path = e.unwrap().path();
            let text = fs::read_to_string(&path).unwrap();
            (
                path.file_name().unwrap().to_string_lossy().into_owned(),
                text,
            )
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

/// Each corpus mixes valid and invalid inputs.
fn check_mix(target: &str, mut ok: impl FnMut(&str) -> bool) {
    let results: Vec<bool> = seeds(target).iter().map(|(_, s)| ok(s)).collect();
    assert!(results.iter().any(|&b| b), "{target}: no valid seed");
    assert!(results.iter().any(|&b| !b), "{target}: no invalid seed");
}

#[test]
fn ring_flags() {
    check_mix("ring_flag", |s| match s.parse::<RingDescriptor>() {
        Ok(d) => {
            assert_eq!(d.to_string().parse::<RingDescriptor>().unwrap(), d);
            Ring::from_descriptor(&d).is_ok()
        }
        Err(_) => false,
    });
}

#[test]
fn ring_json() {
    check_mix("ring_json", |s| match parse_ring_json(s) {
        Ok(r) => {
            assert_eq!(parse_ring_json(&ring_to_json(&r)).unwrap(), r);
            true
        }
        Err(_) => false,
    });
}

#[test]
fn matrix_json() {
    check_mix("matrix_json", |s| match parse_matrix_json(s) {
        Ok(m) => {
            assert_eq!(parse_matrix_json(&matrix_to_json(&m)).unwrap(), m);
            true
        }
        Err(_) => false,
    });
}

#[test]
fn batch_jsonl() {
    check_mix("batch_jsonl", |s| match parse_batch_jsonl(s) {
        Ok(b) => {
            assert_eq!(batch_to_jsonl(&b), s);
            true
        }
        Err(_) => false,
    });
}

#[test]
fn exact_dist_json() {
    check_mix("exact_dist_json", |s| match parse_exact_dist_json(s) {
        Ok(d) => {
            assert_eq!(exact_dist_to_json(&d).trim_end(), s.trim_end());
            true
        }
        Err(_) => false,
    });
}

#[test]
fn n_lists() {
    check_mix("n_list", |s| parse_n_list(s).is_ok());
}
