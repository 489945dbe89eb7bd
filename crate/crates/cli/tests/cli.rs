use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_csi-wiretap"));
    c.env_remove("CSI_WIRETAP_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json_stdout(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

const SIMULATE_EX1: &[&str] = &[
    "simulate", "--preset", "ex1", "--n", "8", "--b", "3", "--runs", "1000", "--seed", "7",
];

fn simulate_to_file(dir: &Path, name: &str, threads: &str) -> Vec<u8> {
    let path = dir.join(name);
    let mut args = SIMULATE_EX1.to_vec();
    args.extend(["--threads", threads, "--out", path.to_str().unwrap()]);
    let out = run(&args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    std::fs::read(&path).unwrap()
}

#[test]
fn simulate_matches_the_golden_report() {
    let dir = tempfile::tempdir().unwrap();
    let got = simulate_to_file(dir.path(), "r.json", "1");
    let path = golden("simulate_ex1.json");
    if std::env::var_os("UPDATE_GOLDEN").is_some() || !path.exists() {
        std::fs::write(&path, &got).unwrap();
    }
    let want = std::fs::read(&path).unwrap();
    assert!(got == want, "report differs from {}", path.display());
}

#[test]
fn simulate_is_independent_of_threads_and_repeats() {
    let dir = tempfile::tempdir().unwrap();
    let a = simulate_to_file(dir.path(), "a.json", "1");
    let b = simulate_to_file(dir.path(), "b.json", "4");
    let c = simulate_to_file(dir.path(), "c.json", "1");
    assert_eq!(a, b);
    assert_eq!(a, c);
}

#[test]
fn reports_carry_version_config_and_seed() {
    let v = json_stdout(&["rate-bounds", "--preset", "ex2", "--seed", "5"]);
    assert_eq!(v["tool"], "csi-wiretap");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["seed"], 5);
    assert_eq!(v["config"]["channel"]["preset"], "ex2");
    assert!(v["config"]["optimizer"]["restarts"].is_u64());
}

#[test]
fn ex4_bounds_meet() {
    let v = json_stdout(&["rate-bounds", "--preset", "ex4", "--eps-phi", "0.2", "--eps-psi", "0.1"]);
    let lower = v["result"]["lower"]["value"].as_f64().unwrap();
    let upper = v["result"]["upper"]["value"].as_f64().unwrap();
    assert_eq!(v["result"]["converse"], true);
    assert!((lower - 0.252932).abs() < 1e-4, "{lower}");
    assert!((upper - 0.252932).abs() < 1e-4, "{upper}");
}

#[test]
fn ex1_reaches_the_state_entropy() {
    let v = json_stdout(&["rate-bounds", "--preset", "ex1", "--eps-s", "0.3"]);
    let lower = v["result"]["lower"]["value"].as_f64().unwrap();
    assert!(lower >= 0.8713 - 1e-2 && lower <= 0.8813 + 1e-4, "{lower}");
}

#[test]
fn deterministic_state_gives_zero_rate() {
    let v = json_stdout(&["rate-bounds", "--preset", "ex1", "--eps-s", "0"]);
    assert!(v["result"]["lower"]["value"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn csv_report_is_flat() {
    let out = run(&["rate-bounds", "--preset", "ex2", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rdr.headers().unwrap(), vec!["field", "value"]);
    let rows: Vec<_> = rdr.records().map(|r| r.unwrap()).collect();
    assert!(rows.iter().any(|r| &r[0] == "version"));
    assert!(rows.iter().any(|r| &r[0] == "result.lower.value"));
}

#[test]
fn channel_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bsc.json");
    // Y = X, Z = X through a BSC(0.1), state ignored
    let mut transition = Vec::new();
    for x in 0..2 {
        for _s in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    let pz = if z == x { 0.9 } else { 0.1 };
                    transition.push(if y == x { pz } else { 0.0 });
                }
            }
        }
    }
    let spec = serde_json::json!({
        "s_size": 2, "x_size": 2, "y_size": 2, "z_size": 2,
        "state_dist": [0.5, 0.5],
        "transition": transition,
    });
    std::fs::write(&path, serde_json::to_string_pretty(&spec).unwrap()).unwrap();
    let v = json_stdout(&["rate-bounds", "--channel-file", path.to_str().unwrap(), "--u-card", "4"]);
    let lower = v["result"]["lower"]["value"].as_f64().unwrap();
    // at least the plain wiretap rate 1 − (1 − h(0.1)) = h(0.1)
    assert!(lower >= 0.4690 - 1e-3, "{lower}");
}

#[test]
fn malformed_channel_file_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\n  \"preset\": \"ex1\",\n  \"eps_s\": 0.3,,\n}\n").unwrap();
    let out = run(&["rate-bounds", "--channel-file", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn zero_blocks_is_a_usage_error() {
    let out = run(&["simulate", "--preset", "ex1", "--b", "0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("at least one message block required"));
}

#[test]
fn unknown_preset_and_conflicting_sources_are_usage_errors() {
    assert_eq!(run(&["rate-bounds", "--preset", "ex9"]).status.code(), Some(2));
    assert_eq!(
        run(&["rate-bounds", "--preset", "ex1", "--channel-file", "x.json"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["rate-bounds", "--preset", "ex1", "--eps-s", "1.5"]).status.code(), Some(2));
}

#[test]
fn oversized_codebook_hits_the_resource_cap() {
    let out = run(&["simulate", "--preset", "ex1", "--n", "40", "--runs", "2"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--n 20"));
}

#[test]
fn verify_ex2_passes() {
    let out = run(&["verify-examples", "--preset", "ex2"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["command"], "verify-examples");
}

#[test]
fn help_exits_zero() {
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}
