use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_haar-modular"));
    c.env_remove("HAAR_MODULAR_SEED");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

#[test]
fn factor() {
    assert_eq!(
        stdout(&["factor", "12"]),
        "{\"m\":12,\"factors\":[[2,2],[3,1]]}\n"
    );
    assert!(stdout(&["factor", "97"]).contains("[[97,1]]"));
    assert_eq!(code(&["factor", "1"]), 2);
    assert_eq!(code(&["factor", "abc"]), 2);
}

#[test]
fn count() {
    let order = |ring: &str, n: &str| {
        let v: serde_json::Value =
            serde_json::from_str(&stdout(&["count", "--ring", ring, "--n", n])).unwrap();
        v["order"].as_str().unwrap().to_string()
    };
    assert_eq!(order("zm:6", "2"), "288");
    assert_eq!(order("fq:2:1", "3"), "168");
    assert_eq!(order("local_pp:2:2", "2"), "96");
    // big orders stay exact
    assert_eq!(
        order("zm:2", "20"),
        "745723734507676325128382997826690083994610764028480981496783619425042685859147732211551179994679395489500429811712000000"
    );
    assert_eq!(code(&["count", "--ring", "zm:1", "--n", "2"]), 2);
    assert_eq!(code(&["count", "--ring", "local_pp:6:2", "--n", "2"]), 2);
    assert_eq!(
        code(&["count", "--ring", "fq:2:2:poly=1,0,1", "--n", "2"]),
        2
    );
}

#[test]
fn sample() {
    let args = ["sample", "--ring", "zm:6", "--n", "3", "--draws", "50"];
    let a = stdout(&args);
    assert_eq!(a, stdout(&args));
    let header: serde_json::Value = serde_json::from_str(a.lines().next().unwrap()).unwrap();
    assert_eq!(header["S"], 3);
    assert_eq!(header["seed"], 0);
    assert_eq!(a.lines().count(), 51);
    assert_eq!(
        code(&["sample", "--ring", "zm:6", "--n", "3", "--draws", "0"]),
        2
    );
    assert_eq!(
        code(&["sample", "--ring", "zm:6", "--n", "3", "--s", "4", "--draws", "5"]),
        2
    );
}

#[test]
fn seed_sources() {
    let base = ["sample", "--ring", "zm:5", "--n", "2", "--draws", "20"];
    let default = stdout(&base);
    let explicit = stdout(&[&base[..], &["--seed", "9"]].concat());
    assert_ne!(default, explicit);
    let from_env = bin()
        .args(base)
        .env("HAAR_MODULAR_SEED", "9")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(from_env.stdout).unwrap(), explicit);
    // the flag wins over the environment
    let both = bin()
        .args(base)
        .args(["--seed", "0"])
        .env("HAAR_MODULAR_SEED", "9")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(both.stdout).unwrap(), default);
}

#[test]
fn dist() {
    let v: serde_json::Value = serde_json::from_str(&stdout(&[
        "dist",
        "--ring",
        "zm:2",
        "--n",
        "2",
        "--s",
        "1",
        "--method",
        "enumerate",
    ]))
    .unwrap();
    let probs = v["probs"].as_array().unwrap();
    assert_eq!(probs.len(), 2);
    assert_eq!(probs[0]["corner"], serde_json::json!([0]));
    assert_eq!(
        probs[0]["prob"],
        serde_json::json!({"num": "1", "den": "3"})
    );
    assert_eq!(probs[1]["corner"], serde_json::json!([1]));
    assert_eq!(
        probs[1]["prob"],
        serde_json::json!({"num": "2", "den": "3"})
    );
    assert_eq!(
        code(&["dist", "--ring", "zm:4", "--n", "2", "--s", "1", "--method", "formula"]),
        2
    );
}

#[test]
fn sweep() {
    let csv = stdout(&[
        "sweep", "--ring", "zm:2", "--s", "1", "--n", "2..10", "--mode", "exact",
    ]);
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "N,mode,tv_num,tv_den,tv_float,draws,seed"
    );
    for (line, n) in lines.zip(2u32..) {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[0], n.to_string());
        assert_eq!((f[2], f[3]), ("1", &*(2 * ((1u64 << n) - 1)).to_string()));
    }
    let json = stdout(&[
        "sweep", "--ring", "zm:2", "--s", "1", "--n", "2,3", "--mode", "exact", "--format", "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["rows"][0]["tv_den"], "6");
    assert_eq!(
        code(&["sweep", "--ring", "zm:2", "--s", "1", "--n", "3..2", "--mode", "exact"]),
        2
    );
    assert_eq!(
        code(&["sweep", "--ring", "zm:2", "--s", "3", "--n", "2..4", "--mode", "exact"]),
        2
    );
}

#[test]
fn verify() {
    let out = run(&["verify", "--suite", "counting"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(
        text.lines()
            .filter(|l| l.starts_with("PASS counting/"))
            .count()
            >= 5
    );
    assert!(!text.contains("FAIL"));
    assert_eq!(code(&["verify", "--suite", "nope"]), 2);
}

#[test]
fn analyze_and_out_files() {
    let dir = tempfile::tempdir().unwrap();
    let batch = dir.path().join("batch.jsonl");
    let dist = dir.path().join("dist.json");
    let b = batch.to_str().unwrap();
    let d = dist.to_str().unwrap();
    assert_eq!(
        code(&["sample", "--ring", "zm:3", "--n", "2", "--draws", "5000", "--out", b]),
        0
    );
    assert_eq!(
        code(&["dist", "--ring", "zm:3", "--n", "2", "--s", "2", "--out", d]),
        0
    );
    let v: serde_json::Value =
        serde_json::from_str(&stdout(&["analyze", "--batch", b, "--reference", d])).unwrap();
    assert_eq!(v["draws"], 5000);
    assert_eq!(v["chi_squared"]["df"], 47);
    assert!(v["chi_squared"]["p_value"].as_f64().unwrap() > 1e-4);
    assert_eq!(code(&["analyze", "--batch", "/nonexistent/batch.jsonl"]), 2);
    std::fs::write(&batch, "not json\n").unwrap();
    assert_eq!(code(&["analyze", "--batch", b]), 2);
}
