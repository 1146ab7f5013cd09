use bsplit::geometry::Verdict;
use bsplit::io::{cmd_classify, cmd_split, cmd_witness, RunOptions, ScenarioConfig, WitnessSection};
use bsplit::scenarios::{scenario, ScenarioSpec};
use std::path::{Path, PathBuf};

fn config(name: &str) -> (ScenarioConfig, Option<PathBuf>) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    ScenarioConfig::load(&path).unwrap()
}

#[test]
fn shipped_configs_round_trip() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("json") {
            continue;
        }
        let (cfg, _) = ScenarioConfig::load(&path).unwrap();
        let back = ScenarioConfig::from_json(&cfg.to_json().unwrap()).unwrap();
        assert_eq!(back.digest().unwrap(), cfg.digest().unwrap(), "{}", path.display());
        scenario(&cfg.scenario).unwrap();
        seen += 1;
    }
    assert!(seen >= 8);
}

#[test]
fn classify_verdicts_and_exit_codes() {
    for (name, verdict, code) in [
        ("ex1_classify.json", Verdict::Bs, 0),
        ("tangent_not_bs.json", Verdict::NotBs, 1),
        ("oscillating.json", Verdict::Indeterminate, 2),
    ] {
        let (cfg, base) = config(name);
        let out = cmd_classify(&cfg, base.as_deref(), RunOptions::default()).unwrap();
        assert_eq!(out.report.verdict, Some(verdict), "{name}");
        assert_eq!(out.report.exit_code, code, "{name}");
    }
}

#[test]
fn tangential_split_writes_report_and_tables() {
    let (cfg, base) = config("ex3_split.json");
    let out = cmd_split(&cfg, base.as_deref(), RunOptions { refine: Some(1), seed: None }).unwrap();
    assert!(out.report.passed, "{:?}", out.report.entries);
    assert_eq!(out.report.provenance.refine, Some(1));
    let dir = std::env::temp_dir().join(format!("bsplit-pipeline-{}", std::process::id()));
    let paths = out.write(&dir).unwrap();
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["command"], "split");
    assert_eq!(report["provenance"]["config_sha256"], cfg.digest().unwrap());
    assert!(paths.iter().any(|p| p.extension().is_some_and(|e| e == "csv")));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn short_witness_family_passes() {
    let (mut cfg, base) = config("witness_angle.json");
    let w = cfg.witness.take().unwrap();
    cfg.witness = Some(WitnessSection { n_min: 3, n_max: 7, ..w });
    let out = cmd_witness(&cfg, base.as_deref(), RunOptions::default()).unwrap();
    assert!(out.report.passed, "{:?}", out.report.entries);
    let slope = out.report.entries.iter().find(|e| e.name == "slope").unwrap().value;
    assert!((slope - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 0.2 / (2.0 * std::f64::consts::PI));
}

#[test]
fn split_rejects_a_scenario_without_cutting_function() {
    let cfg = ScenarioConfig::new(ScenarioSpec::TangentNotBs {
        phi1: bsplit::geometry::GraphSpec::power(1.0, 2.0),
        delta: bsplit::geometry::GraphSpec::power(1.0, 3.0),
        domain_end: 0.5,
    });
    assert!(cmd_split(&cfg, None, RunOptions::default()).is_err());
}
