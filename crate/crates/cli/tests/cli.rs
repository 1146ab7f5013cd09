use std::path::{Path, PathBuf};
use std::process::Command;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str], config: &Path, out: &Path) -> (i32, String) {
    let o = Command::new(env!("CARGO_BIN_EXE_bsplit"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .env("BSPLIT_WORKERS", "1")
        .output()
        .unwrap();
    (o.status.code().unwrap(), String::from_utf8_lossy(&o.stdout).into_owned())
}

fn report(out: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap()
}

#[test]
fn classify_exit_codes_follow_the_verdict() {
    for (name, code, label) in
        [("ex1_classify.json", 0, "BS"), ("tangent_not_bs.json", 1, "NOT_BS"), ("oscillating.json", 2, "INDETERMINATE")]
    {
        let dir = tempfile::tempdir().unwrap();
        let (status, stdout) = run(&["classify"], &configs().join(name), dir.path());
        assert_eq!(status, code, "{name}: {stdout}");
        assert!(stdout.lines().next().unwrap().ends_with(label), "{stdout}");
        assert_eq!(report(dir.path())["exit_code"], code);
    }
}

#[test]
fn seed_and_refine_are_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let (status, _) = run(&["classify", "--refine", "12", "--seed", "7"], &configs().join("ex1_classify.json"), dir.path());
    assert_eq!(status, 0);
    let r = report(dir.path());
    assert_eq!(r["provenance"]["seed"], 7);
    assert_eq!(r["provenance"]["refine"], 12);
    assert_eq!(r["provenance"]["config_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn witness_passes_and_writes_a_table() {
    let dir = tempfile::tempdir().unwrap();
    let (status, stdout) = run(&["witness", "--refine", "3"], &configs().join("witness_angle.json"), dir.path());
    assert_eq!(status, 0, "{stdout}");
    assert!(dir.path().join("witness_family.csv").exists());
}

#[test]
fn bad_configs_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"scenario": {"name": "EX1", "k": 1, "mu": 1}, "unknown_field": 1}"#).unwrap();
    assert_eq!(run(&["classify"], &bad, &dir.path().join("out")).0, 3);
    assert_eq!(run(&["split"], &dir.path().join("missing.json"), &dir.path().join("out")).0, 3);
    // a chain-only command on a scenario without a chain
    assert_eq!(run(&["theorem9"], &configs().join("ex1_classify.json"), &dir.path().join("out")).0, 3);
}
