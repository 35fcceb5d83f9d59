use std::path::PathBuf;
use std::process::Command;

use rr0cert::io::parse_description;
use rr0cert::stock;
use serde_json::Value;

fn sample(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../samples").join(name)
}

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_rr0cert"));
    for var in ["RR0CERT_GRID", "RR0CERT_REFINE", "RR0CERT_SEED", "RR0CERT_TOL", "RR0CERT_OUT", "RR0CERT_TRIALS"] {
        c.env_remove(var);
    }
    c
}

fn run_json(args: &[&str]) -> (i32, Value) {
    let out = bin().args(args).output().unwrap();
    let code = out.status.code().unwrap();
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (code, v)
}

#[test]
fn samples_match_stock_descriptions() {
    let cases = [
        ("dinf.grp", stock::infinite_dihedral()),
        ("z2_minus_identity.grp", stock::z2_by_minus_identity()),
        ("z2_order_three.grp", stock::z2_by_order_three()),
        ("z3.grp", stock::free_abelian(3)),
        ("rationals.grp", stock::rationals(1, 3)),
        ("sum_z2.grp", stock::direct_sum_z2(3)),
        ("lamplighter.grp", stock::lamplighter()),
        ("z_wreath_z.grp", stock::z_wreath_z(3)),
        ("ut_union.grp", stock::unitriangular_union(3)),
    ];
    for (file, expected) in cases {
        let parsed = parse_description(&sample(file)).unwrap().description;
        assert_eq!(parsed, expected, "{file}");
    }
}

#[test]
fn analyze_dinf_exit_zero() {
    let (code, v) = run_json(&["analyze", sample("dinf.grp").to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["certificate"]["verdict"], "NotRealRankZero");
    assert_eq!(v["result"]["certificate"]["omega"]["exact"], 2.0);
    assert_eq!(v["config"]["seed"], rr0cert::DEFAULT_SEED);
    assert!(v["result"]["certificate"]["timings"].get("wall_ms").is_none());
    assert_eq!(v["tool"], "rr0cert");
}

#[test]
fn hirsch_of_free_abelian() {
    let (code, v) = run_json(&["hirsch", sample("z3.grp").to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["hirsch_length"], 3);
    let (_, v) = run_json(&["hirsch", sample("z_wreath_z.grp").to_str().unwrap()]);
    assert_eq!(v["result"]["hirsch_length"], "+inf");
}

#[test]
fn oscillation_with_surface_dump() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let out = dir.path().join("report.json");
    let status = bin()
        .args(["oscillation", sample("ex_beta_powers.grp").to_str().unwrap(), "--grid", "256", "--refine", "0"])
        .arg("--dump-surface")
        .arg(&csv)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let lower = v["result"]["sampled"]["omega_lower"].as_f64().unwrap();
    let upper = v["result"]["sampled"]["omega_upper"].as_f64().unwrap();
    assert!((2.0 - 1e-3..=2.0).contains(&lower) && upper == 2.0, "{lower} {upper}");
    assert_eq!(v["result"]["exact"]["omega_lower"], 2.0);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("component,theta_1,norm"));
    assert_eq!(lines.next(), Some("0,0,0"));
    assert_eq!(text.lines().count(), 257);
    assert!(text.lines().any(|l| l == "0,0.5,2"));
}

#[test]
fn env_overrides_file_and_flag_overrides_env() {
    let path = sample("ex_beta_powers.grp");
    let out = bin().env("RR0CERT_GRID", "16").args(["oscillation", path.to_str().unwrap()]).output().unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["grid"], 16);
    let out = bin()
        .env("RR0CERT_GRID", "16")
        .args(["oscillation", path.to_str().unwrap(), "--grid", "32"])
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["grid"], 32);
    let (_, v) = run_json(&["oscillation", path.to_str().unwrap()]);
    assert_eq!(v["config"]["grid"], 256);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.grp");
    std::fs::write(&bad, r#"{"version": 1, "group": {"kind": "abelian", "torsion_factors": [4, 6]}}"#).unwrap();
    let out = bin().args(["analyze", bad.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("divisibility"));
    let unknown = dir.path().join("unknown.grp");
    std::fs::write(&unknown, "{\"version\": 1,\n\"group\": {\"kind\": \"abelian\"},\n\"extra\": 1}").unwrap();
    let out = bin().args(["analyze", unknown.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    let (code, _) = run_json(&["embed-audit", sample("lamplighter.grp").to_str().unwrap()]);
    assert_eq!(code, 2);
    let (code, _) = run_json(&["oscillation", sample("dinf.grp").to_str().unwrap()]);
    assert_eq!(code, 2);
    let (code, _) = run_json(&["analyze", dir.path().join("missing.grp").to_str().unwrap()]);
    assert_eq!(code, 2);
}

#[test]
fn embed_audit_and_series() {
    let (code, v) = run_json(&["embed-audit", sample("z2_order_three.grp").to_str().unwrap(), "--trials", "20"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["passed"], true);
    assert_eq!(v["result"]["index"], 3);
    assert_eq!(v["config"]["trials"], 20);
    let (code, v) = run_json(&["series-normalize", sample("series.grp").to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["normalized"], serde_json::json!(["LF", "Ab", "LF", "Ab"]));
}

#[test]
fn timings_flag_adds_wall_clock() {
    let (_, v) = run_json(&["analyze", sample("dinf.grp").to_str().unwrap(), "--timings"]);
    assert!(v["result"]["certificate"]["timings"]["wall_ms"].is_number());
}
