//! End-to-end runs of the `sykmix` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn write_config(dir: &TempDir, name: &str, json: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, json).unwrap();
    p
}

fn run(args: &[&str], config: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sykmix"))
        .args(args)
        .arg("--config")
        .arg(config)
        .output()
        .unwrap()
}

fn json_rows(args: &[&str], config: &Path) -> Vec<Value> {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    let out = run(&a, config);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    v["rows"].as_array().unwrap().clone()
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap()
}

const TWO_MODELS: &str = r#"{
  "seed": 7,
  "samples": 2000,
  "families": [{ "models": [
    { "label": 1, "domain": { "range": [1, 8] }, "r": 2 },
    { "label": 2, "domain": { "range": [5, 12] }, "r": 3 }
  ]}],
  "words": [[1, 1], [1, 2, 1, 2]],
  "methods": ["dense-mc", "limit"]
}"#;

#[test]
fn identical_runs_are_bit_identical() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "m.json", TWO_MODELS);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert!(run(&["moments", "--threads", "2", "--out", a.to_str().unwrap()], &cfg).status.success());
    assert!(run(&["moments", "--threads", "2", "--out", b.to_str().unwrap()], &cfg).status.success());
    let (a, b) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(a, b);
    assert!(!a.contains(&b'\r'));
    let text = String::from_utf8(a.clone()).unwrap();
    assert!(text.starts_with("# tool: sykmix "));
    assert!(text.contains("\n# seed: 7\n"));
    assert!(text.contains("# config-sha256: "));
    // A different thread count gives the same numbers.
    let single = run(&["moments", "--threads", "1"], &cfg);
    assert_eq!(single.stdout, a);
}

#[test]
fn seed_flag_overrides_config() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "m.json", TWO_MODELS);
    let base = run(&["moments"], &cfg).stdout;
    let other = run(&["moments", "--seed", "8"], &cfg).stdout;
    assert_ne!(base, other);
    assert!(String::from_utf8(other).unwrap().contains("\n# seed: 8\n"));
}

#[test]
fn second_moment_and_limit_value() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "m.json", TWO_MODELS);
    let rows = json_rows(&["moments"], &cfg);
    assert_eq!(rows.len(), 4);
    let second = &rows[0];
    assert_eq!(second["method"], "dense-mc");
    assert!((f(&second["value"]) - 1.0).abs() <= 3.0 * f(&second["stderr"]));
    // λ̂ = 2·3·4/64 and r₁r₂ even, so q = e^{−2λ̂}.
    let limit = &rows[3];
    assert_eq!(limit["word"], "(1,2,1,2)");
    assert!((f(&limit["value"]) - (-0.75f64).exp()).abs() < 1e-12);
}

#[test]
fn json_and_csv_share_provenance() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "m.json", TWO_MODELS);
    let csv = String::from_utf8(run(&["moments"], &cfg).stdout).unwrap();
    let json: Value = serde_json::from_slice(&run(&["moments", "--format", "json"], &cfg).stdout).unwrap();
    let hash = json["provenance"]["config_sha256"].as_str().unwrap();
    assert!(csv.contains(&format!("# config-sha256: {hash}\n")));
    assert_eq!(json["config"]["seed"], 7);
}

#[test]
fn oversized_interaction_length_is_a_config_error() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "bad.json",
        r#"{"families":[{"models":[{"label":3,"domain":[1,2,3],"r":4}]}],"words":[[3,3]]}"#,
    );
    let out = run(&["moments"], &cfg);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("label 3"));
}

#[test]
fn schema_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(&dir, "x.json", r#"{"seed": 1, "bogus": true}"#);
    assert_eq!(run(&["stats"], &cfg).status.code(), Some(2));
    let cfg = write_config(&dir, "y.json", r#"{"words": [[1, 1]]}"#);
    assert_eq!(run(&["moments"], &cfg).status.code(), Some(2));
}

#[test]
fn resource_caps_exit_with_three() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "cap.json",
        r#"{"families":[{"models":[{"label":1,"domain":{"range":[1,40]},"r":8}]}],"words":[[1,1,1,1]]}"#,
    );
    assert_eq!(run(&["moments"], &cfg).status.code(), Some(3));
}

#[test]
fn mixed_parity_sweep_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "p.json",
        r#"{"sweep":{"n":[8,10],"models":[{"label":1,"r":{"fraction":0.5}}]},"words":[[1,1]]}"#,
    );
    assert_eq!(run(&["converge"], &cfg).status.code(), Some(2));
}

#[test]
fn disjoint_even_family_has_zero_gap() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "c.json",
        r#"{
          "sweep": { "n": [10, 20, 40], "models": [
            { "label": 1, "start": 1, "r": 2 },
            { "label": 2, "start": { "n": 1, "c": 1 }, "r": 4 }
          ]},
          "words": [[1, 2, 1, 2]]
        }"#,
    );
    let rows = json_rows(&["converge"], &cfg);
    assert_eq!(rows.len(), 3);
    for row in rows {
        assert_eq!(f(&row["gap"]), 0.0);
        assert_eq!(f(&row["estimate"]), 1.0);
    }
}

#[test]
fn half_overlap_sweep_does_not_converge() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "h.json",
        r#"{
          "sweep": { "n": [8, 16, 32, 64], "models": [
            { "label": 1, "r": { "fraction": 0.5 } },
            { "label": 2, "start": { "n": 1 }, "r": { "fraction": 0.5 } }
          ]},
          "words": [[1, 2, 1, 2]]
        }"#,
    );
    for row in json_rows(&["converge"], &cfg) {
        assert!(f(&row["gap"]) >= 0.1065, "{row}");
    }
}

#[test]
fn single_edge_gaps_shrink() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "s.json",
        r#"{
          "sweep": { "n": [1000, 10000, 100000], "models": [
            { "label": 1, "r": { "sqrt": 1.0 } },
            { "label": 2, "r": { "sqrt": 1.0 } }
          ], "lambda": [{ "pair": [1, 2], "value": 1.0 }] },
          "words": [[1, 2, 1, 2]]
        }"#,
    );
    let gaps: Vec<f64> = json_rows(&["converge"], &cfg).iter().map(|r| f(&r["gap"])).collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
    assert!(gaps[2] < 0.01);
}

#[test]
fn epsilon_check_reports() {
    let dir = TempDir::new().unwrap();
    let empty = write_config(&dir, "e.json", r#"{"graph":{"vertices":3}}"#);
    let rows = json_rows(&["epsilon-check"], &empty);
    assert_eq!(rows[0]["passed"], true);
    let mutated = write_config(
        &dir,
        "m.json",
        r#"{"graph":{"vertices":2,"edges":[[1,2]]},"epsilon":{"q_overrides":[{"pair":[1,2],"value":0.5}]}}"#,
    );
    let rows = json_rows(&["epsilon-check"], &mutated);
    assert_eq!(rows[0]["passed"], false);
    assert!(rows[0]["failures"].as_u64().unwrap() > 0);
    let all = write_config(&dir, "a.json", r#"{"epsilon":{"all_up_to":3,"max_len":4}}"#);
    let rows = json_rows(&["epsilon-check"], &all);
    assert_eq!(rows.len(), 1 + 2 + 8);
    assert!(rows.iter().all(|r| r["passed"] == true));
}

#[test]
fn stats_half_overlap_and_zeroth_moment() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        &dir,
        "st.json",
        r#"{
          "seed": 11,
          "samples": 100000,
          "stats": {
            "pair": { "n1": 1000, "n2": 1000, "a": 1, "r1": 500, "r2": 500 },
            "quantities": ["sign", "sign-mc", "falling-factorial"],
            "k": [0, 1]
          }
        }"#,
    );
    let rows = json_rows(&["stats"], &cfg);
    assert_eq!(f(&rows[0]["value"]), 0.5);
    let mc = &rows[1];
    assert!((f(&mc["value"]) - 0.5).abs() <= 3.0 * f(&mc["stderr"]), "{mc}");
    assert_eq!(rows[2]["k"], 0);
    assert_eq!(f(&rows[2]["value"]), 1.0);
    assert!((f(&rows[3]["value"]) - 0.25).abs() <= 3.0 * f(&rows[3]["stderr"]));
}

#[test]
fn shipped_configs_parse() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for entry in std::fs::read_dir(root).unwrap() {
        let text = std::fs::read_to_string(entry.unwrap().path()).unwrap();
        let _: Value = serde_json::from_str(&text).unwrap();
    }
}
