use std::path::Path;
use std::process::{Command, Output};

fn cmspectra(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cmspectra"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

const SMALL_GAP: &str = "n = 300\nreplicates = 3\nfamily = { kind = \"band\", lo = 4, hi = 8 }\ntiming = false\n";

#[test]
fn gap_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "gap.toml", SMALL_GAP);
    let out = dir.path().join("out");
    let o = cmspectra(&["gap", "--config", &cfg, "--seed", "7", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(out.join("gap.csv")).unwrap();
    assert_eq!(csv.lines().count(), 7);
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("gap_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["meta"]["seed"], 7);
}

#[test]
fn stdout_output_is_reproducible_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "gap.toml", SMALL_GAP);
    let a = cmspectra(&["gap", "--config", &cfg, "--workers", "1"]);
    let b = cmspectra(&["gap", "--config", &cfg, "--workers", "2"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    let json = cmspectra(&["gap", "--config", &cfg, "--format", "json", "--replicates", "2"]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 4);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.toml", "replicates = 0\n");
    assert_eq!(cmspectra(&["gap", "--config", &bad]).status.code(), Some(2));
    let unknown = write(dir.path(), "unknown.toml", "colour = \"blue\"\n");
    assert_eq!(cmspectra(&["sweep", "--config", &unknown]).status.code(), Some(2));
    assert_eq!(cmspectra(&["esd", "--config", "/nonexistent.toml"]).status.code(), Some(2));
    assert_eq!(cmspectra(&["gap", "--format", "xml"]).status.code(), Some(2));

    let infeasible = write(
        dir.path(),
        "infeasible.toml",
        "n = 6\nreplicates = 1\nsampler = \"cm-mcmc\"\nfamily = { kind = \"two_block\", low = 1, high = 5 }\n",
    );
    assert_eq!(cmspectra(&["gap", "--config", &infeasible]).status.code(), Some(3));

    let stingy = write(dir.path(), "stingy.toml", &format!("{SMALL_GAP}max_iter = 2\n"));
    assert_eq!(cmspectra(&["gap", "--config", &stingy]).status.code(), Some(4));

    let wrong_kind = write(dir.path(), "kind.toml", "experiment = \"esd\"\n");
    assert_eq!(cmspectra(&["gap", "--config", &wrong_kind]).status.code(), Some(2));
}

#[test]
fn oracle_subcommand() {
    let o = cmspectra(&["oracle", "--degrees", "2,2,2"]);
    assert!(o.status.success());
    let law: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(law["p_simple"], "8/15");
    assert_eq!(law["total_matchings"], 15);

    let preds = cmspectra(&["oracle", "--degrees", "2,2,2", "--predictions"]);
    let v: serde_json::Value = serde_json::from_slice(&preds.stdout).unwrap();
    assert!(v.as_array().unwrap().iter().any(|p| p["name"] == "expected_h_quadratic_k1"));

    let dir = tempfile::tempdir().unwrap();
    let file = write(dir.path(), "deg.txt", "1\n2\n1\n");
    let o = cmspectra(&["oracle", "--degrees-file", &file, "--format", "csv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("functional,unconditioned,conditioned\n"));

    assert_eq!(cmspectra(&["oracle", "--degrees", "3,3,3,3,3,3"]).status.code(), Some(2));
    assert_eq!(cmspectra(&["oracle", "--degrees", "1,2"]).status.code(), Some(2));
}

#[test]
fn validate_fast_criteria() {
    let dir = tempfile::tempdir().unwrap();
    let o = cmspectra(&[
        "validate",
        "--criterion",
        "1",
        "--criterion",
        "2",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
    assert!(text.lines().all(|l| l.contains(" PASS: ")));
    assert!(dir.path().join("validate.json").exists());
    assert_eq!(cmspectra(&["validate", "--criterion", "9"]).status.code(), Some(2));
}
