use std::io::Write;
use std::process::{Command, Output, Stdio};

fn privcount(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_privcount"))
        .args(args)
        .env_remove("PRIVCOUNT_PRECISION")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(args: &[&str]) -> String {
    let out = privcount(args, "");
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn morris_row_csv() {
    let text = stdout(&["dist", "morris", "--n", "3", "--digits", "6"]);
    assert_eq!(text, "n,l,p\n3,1,0.125000\n3,2,0.593750\n3,3,0.265625\n3,4,0.0156250\n");
}

#[test]
fn maxgeo_pmf_and_cdf() {
    let text = stdout(&["dist", "maxgeo", "--n", "3", "--l", "1", "--digits", "4"]);
    assert_eq!(text, "n,l,pmf,cdf\n3,1,0.1250,0.1250\n");
}

#[test]
fn morris_audit_json() {
    let v: serde_json::Value = serde_json::from_str(&stdout(&["audit", "morris", "--n", "32"])).unwrap();
    assert_eq!(v["n"], 32);
    assert_eq!(v["direction"], "forward");
    assert!((v["epsilon_exact"].as_f64().unwrap() - std::f64::consts::LN_2).abs() < 1e-15);
}

#[test]
fn maxgeo_min_n_json() {
    let v: serde_json::Value =
        serde_json::from_str(&stdout(&["audit", "maxgeo", "--epsilon", "0.5", "--delta", "4.248e-18", "--check"]))
            .unwrap();
    assert_eq!(v["n_min"], 140);
    assert_eq!(v["check"]["cdf_ok"], true);
    assert_eq!(v["check"]["ratio_ok"], true);
}

#[test]
fn serve_over_stdin() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("serve.json");
    std::fs::write(&cfg, r#"{"endpoint": "stdin", "mechanism": "maxgeo", "seed": 2}"#).unwrap();
    let out = privcount(&["serve", "--config", cfg.to_str().unwrap()], "VOTE 1\nSTATUS\nRELEASE\nVOTE 1\n");
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[..2], ["ACK", "COUNT 1"]);
    assert!(lines[2].starts_with("VALUE "));
    assert_eq!(lines[3], "ERR released");
}

#[test]
fn serve_without_release_fails() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("serve.json");
    std::fs::write(&cfg, r#"{"endpoint": "stdin", "mechanism": "morris"}"#).unwrap();
    let out = privcount(&["serve", "--config", cfg.to_str().unwrap()], "VOTE 1\n");
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn survey_writes_trials() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.json");
    let csv = dir.path().join("t.csv");
    std::fs::write(&cfg, r#"{"population": 50, "true_count": 20, "mechanism": "morris", "trials": 7}"#).unwrap();
    let v: serde_json::Value =
        serde_json::from_str(&stdout(&["survey", "--config", cfg.to_str().unwrap(), "--trials-csv", csv.to_str().unwrap()]))
            .unwrap();
    assert_eq!(v["config"]["trials"], 7);
    let rows = std::fs::read_to_string(csv).unwrap();
    assert_eq!(rows.lines().count(), 8);
    assert!(rows.starts_with("trial,released,estimate\n"));
}

#[test]
fn tables_and_compare() {
    let alfa = stdout(&["tables", "--alfa", "--digits", "6"]);
    assert_eq!(alfa.lines().count(), 12);
    assert!(alfa.lines().nth(11).unwrap().starts_with("11,125.065,"));
    let cmp = stdout(&["compare", "--n", "200"]);
    assert!(cmp.starts_with("method,epsilon,delta,epsilon_approx,estimator,variance,memory_bits\n"));
    assert_eq!(cmp.lines().count(), 4);
}

#[test]
fn phi_constant() {
    let text = stdout(&["phi", "--digits", "6"]);
    assert!(text.lines().nth(1).unwrap().contains(",0.773516,"), "{text}");
}

#[test]
fn precision_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_privcount"))
        .args(["dist", "morris", "--n", "5", "--moments"])
        .env("PRIVCOUNT_PRECISION", "32")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_codes() {
    assert_eq!(privcount(&["audit", "morris", "--n", "16"], "").status.code(), Some(1));
    assert_eq!(privcount(&["audit", "maxgeo", "--n", "10", "--delta", "0.00033"], "").status.code(), Some(1));
    assert_eq!(privcount(&["audit", "morris"], "").status.code(), Some(2));
    assert_eq!(privcount(&["survey", "--config", "/nonexistent/x.json"], "").status.code(), Some(1));
    let err = privcount(&["compare", "--n", "3"], "");
    assert!(String::from_utf8_lossy(&err.stderr).starts_with("error: "));
}
