use std::path::Path;
use std::process::{Command, Output};

use qdetect::scenarios::{build_ghsz, build_rt_analogue, save_scenario};
use qdetect::Tolerance;
use qdetect_cli::{cmd_c3, cmd_detect, cmd_ghsz, cmd_mixture, cmd_simulate, OutputFormat, SimulateOptions};
use serde_json::Value;

fn qdetect(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdetect"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn scenario_dir() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    save_scenario(&build_ghsz().unwrap(), dir.path().join("ghsz.json")).unwrap();
    save_scenario(&build_rt_analogue().unwrap(), dir.path().join("rt.json")).unwrap();
    dir
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

#[test]
fn ghsz_default_run_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = qdetect(&["ghsz"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["command"], "ghsz");
    assert_eq!(r["summary"]["failed"], 0);
    assert_eq!(r["inputs"]["satisfying_assignments"], 0);
    assert_eq!(r["inputs"]["total_assignments"], 128);
    for c in r["checks"].as_array().unwrap() {
        assert!(
            c["name"].is_string() && c["pass"].is_boolean() && c["residual"].is_number() && c["reference"].is_string()
        );
    }
}

#[test]
fn ghsz_below_machine_precision_fails() {
    let dir = tempfile::tempdir().unwrap();
    let out = qdetect(&["ghsz", "--tol", "1e-20"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(json(&out)["summary"]["failed"].as_u64().unwrap() > 0);
}

#[test]
fn invalid_tolerance_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(qdetect(&["ghsz", "--tol", "-1"], dir.path()).status.code(), Some(2));
    assert_eq!(qdetect(&["ghsz", "--output", "xml"], dir.path()).status.code(), Some(2));
    assert_eq!(qdetect(&[], dir.path()).status.code(), Some(2));
}

#[test]
fn detect_exit_codes() {
    let dir = scenario_dir();
    assert_eq!(
        qdetect(&["detect", "ghsz.json", "M", "Gα"], dir.path()).status.code(),
        Some(0)
    );
    assert_eq!(
        qdetect(&["detect", "ghsz.json", "Ea", "Eb"], dir.path()).status.code(),
        Some(1)
    );
    assert_eq!(
        qdetect(&["detect", "ghsz.json", "M", "Nope"], dir.path()).status.code(),
        Some(2)
    );
    assert_eq!(
        qdetect(&["detect", "missing.json", "M", "Ga"], dir.path())
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        qdetect(&["detect", "rt.json", "T", "F"], dir.path()).status.code(),
        Some(0)
    );
}

#[test]
fn mixture_matches_expected_failure_pattern() {
    let dir = tempfile::tempdir().unwrap();
    let out = qdetect(&["mixture", "--theta", "0.5236", "--output", "text"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("fails (expected) for rho1"));
    assert_eq!(
        qdetect(&["mixture", "--theta", "0.7853981633974483"], dir.path())
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn c3_on_commuting_pair_passes() {
    let dir = scenario_dir();
    let out = qdetect(&["c3", "ghsz.json", "Gα", "F", "--output", "csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("name,pass,residual,reference\n"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn simulate_detection_pair_writes_csv_and_has_no_discordance() {
    let dir = scenario_dir();
    let out = qdetect(
        &["simulate", "ghsz.json", "M", "Gα", "--samples", "100000", "--seed", "7"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    let check = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "M and Ga never disagree")
        .unwrap();
    assert_eq!(check["residual"], 0.0);
    let csv = std::fs::read_to_string(dir.path().join("ghsz.ensemble.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("id,M,Ga"));
    assert_eq!(csv.lines().count(), 100_001);
}

#[test]
fn reports_are_byte_identical_across_runs_and_workers() {
    let dir = scenario_dir();
    let run = |workers: &str, csv: &str| {
        qdetect(
            &[
                "simulate",
                "ghsz.json",
                "Ea",
                "F",
                "--samples",
                "20000",
                "--seed",
                "3",
                "--workers",
                workers,
                "--csv",
                csv,
            ],
            dir.path(),
        )
    };
    let a = run("1", "x.csv");
    let b = run("6", "x.csv");
    assert_eq!(a.stdout, b.stdout);
    let ca = std::fs::read(dir.path().join("x.csv")).unwrap();
    run("3", "y.csv");
    assert_eq!(ca, std::fs::read(dir.path().join("y.csv")).unwrap());
    assert_eq!(
        qdetect(&["ghsz"], dir.path()).stdout,
        qdetect(&["ghsz"], dir.path()).stdout
    );
}

#[test]
fn simulate_rejects_non_commuting_family() {
    let dir = scenario_dir();
    let out = qdetect(&["simulate", "ghsz.json", "Ea", "Eb", "--samples", "10"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("do not commute"));
}

#[test]
fn scenario_subcommand_prints_loadable_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = qdetect(&["scenario", "rt-analogue"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let scn =
        qdetect::scenarios::parse_scenario(std::str::from_utf8(&out.stdout).unwrap(), &Tolerance::default()).unwrap();
    assert_eq!(scn, build_rt_analogue().unwrap());
}

#[test]
fn library_commands_agree_with_exit_contract() {
    let dir = scenario_dir();
    let tol = Tolerance::default();
    let ghsz = dir.path().join("ghsz.json");
    assert!(cmd_ghsz(&tol).unwrap().passed());
    assert_eq!(cmd_detect(&ghsz, "Ea", "Eb", &tol).unwrap().exit_code(), 1);
    assert!(cmd_mixture(std::f64::consts::FRAC_PI_6, &tol).unwrap().passed());
    assert!(cmd_c3(&ghsz, "Ga", "F", &tol).unwrap().passed());
    let opts = SimulateOptions {
        samples: 1000,
        csv: Some(dir.path().join("s.csv")),
        ..SimulateOptions::default()
    };
    let r = cmd_simulate(&ghsz, &["N".into(), "Eb".into()], &opts, &tol).unwrap();
    assert!(r.passed());
    assert!(r.check_named("N and Eb never disagree").is_some());
    let text = r.render(OutputFormat::Text);
    assert!(text.ends_with(&format!("{} passed, 0 failed\n", r.summary.passed)));
}
