use std::path::PathBuf;
use std::process::Command;

use gwloc::cli::{run_with_output, EXIT_INPUT, EXIT_MISMATCH, EXIT_OK};

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name).display().to_string()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("gwloc").chain(args.iter().copied());
    let code = run_with_output(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

/// Runs the real binary with its own cache directory.
fn binary(cache: &std::path::Path, args: &[&str]) -> (i32, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_gwloc")).args(args).env("GWLOC_CACHE_DIR", cache).output().unwrap();
    (o.status.code().unwrap(), String::from_utf8(o.stdout).unwrap())
}

#[test]
fn validate_accepts_and_rejects() {
    let (code, out, _) = run(&["target", "validate", &data("p2.json")]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("\"chain_free\": true"), "{out}");

    let (code, out, _) = run(&["target", "validate", &data("p2_chain.json")]);
    assert_eq!(code, EXIT_MISMATCH);
    assert!(out.contains("collinear_tangent_weights"), "{out}");
}

#[test]
fn invariant_counts_conics() {
    let (code, out, _) = run(&["invariant", "--target", &data("p2.json"), "--class", "2", "--insertions", &data("points5.json"), "--no-cache"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["value"], "1");
    assert_eq!(v["mode"], "symbolic");
}

#[test]
fn bad_input_exits_with_input_code() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"[{"class": "H^"}, {"class": "pt"}]"#).unwrap();
    let bad = bad.display().to_string();
    let (code, _, err) = run(&["invariant", "--target", &data("p1.json"), "--class", "1", "--insertions", &bad, "--no-cache"]);
    assert_eq!(code, EXIT_INPUT, "{err}");

    let (code, _, err) = run(&["invariant", "--target", &data("p1.json"), "--class", "1,1", "--insertions", &data("points2.json"), "--no-cache"]);
    assert_eq!(code, EXIT_INPUT, "{err}");
    assert!(err.contains("rank"), "{err}");

    let (code, _, _) = run(&["frobnicate"]);
    assert_eq!(code, EXIT_INPUT);
    let (code, _, _) = run(&["target", "validate", "/nonexistent/target.json"]);
    assert_eq!(code, EXIT_INPUT);
}

#[test]
fn recursion_check_and_injected_fault() {
    let (code, out, _) = run(&["jfun", "verify", "--target", &data("p1.json"), "--degree", "2"]);
    assert_eq!(code, EXIT_OK, "{out}");
    let (code, out, _) = run(&["jfun", "verify", "--target", &data("p1.json"), "--degree", "2", "--inject-fault"]);
    assert_eq!(code, EXIT_MISMATCH, "{out}");
    assert!(out.contains("\"passed\": false"));
}

#[test]
fn chern_matched_pair_is_refused() {
    let (code, _, err) = run(&["compare", &data("f0_vs_f2_chern_matched.json"), "--no-cache"]);
    assert_eq!(code, EXIT_INPUT);
    assert!(err.contains("collinear"), "{err}");
}

#[test]
fn output_is_reproducible_and_cache_transparent() {
    let dir = tempfile::tempdir().unwrap();
    let three = dir.path().join("three.json");
    std::fs::write(&three, r#"[{"class": "pt"}, {"class": "pt"}, {"class": "pt"}]"#).unwrap();
    let three = three.display().to_string();
    let f0 = data("f0.json");
    let args = ["invariant", "--target", &f0, "--class", "1,1", "--insertions", &three, "--mode", "evaluated", "--seed", "7"];

    let cache = dir.path().join("cache");
    let (c1, first) = binary(&cache, &args);
    let (c2, second) = binary(&cache, &args);
    let mut bypass = args.to_vec();
    bypass.push("--no-cache");
    let (c3, uncached) = binary(&cache, &bypass);
    assert_eq!((c1, c2, c3), (0, 0, 0));
    assert_eq!(first, second);
    assert_eq!(first, uncached);
    let v: serde_json::Value = serde_json::from_str(&first).unwrap();
    assert_eq!(v["seed"], 7);

    let (code, out) = binary(&cache, &["cache", "stats"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("1 entries"), "{out}");
}

#[test]
fn small_comparison_passes() {
    let dir = tempfile::tempdir().unwrap();
    let (code, out) = binary(dir.path(), &["compare", &data("f0_vs_f2_small.json"), "--workers", "2"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["all_equal"], true);
    assert!(v.get("cache_hits").is_none());
}
