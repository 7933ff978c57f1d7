use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn cohsteer(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cohsteer"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn small_config(dir: &Path, seed: u64) -> String {
    let path = dir.join("config.json");
    let json = format!(
        r#"{{"thetas": [10, 45, 80], "counts_per_setting": 5000, "visibility": 0.995,
            "dephasing": 0.005, "bootstrap_resamples": 20, "seed": {seed}}}"#
    );
    fs::write(&path, json).unwrap();
    path.display().to_string()
}

#[test]
fn simulate_writes_every_artefact() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), 3);
    let out = cohsteer(&["simulate", "--config", &cfg, "--out", "run"], dir.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let run = dir.path().join("run");
    for f in [
        "tables.csv",
        "sigeur.csv",
        "report.json",
        "plotdata/l1c.csv",
        "plotdata/sigeur.csv",
    ] {
        assert!(run.join(f).exists(), "{f} missing");
    }
    let tables = fs::read_to_string(run.join("tables.csv")).unwrap();
    let mut lines = tables.lines();
    assert_eq!(
        lines.next().unwrap(),
        "theta_deg,measure,s0_theory,s12half_theory,s012third_theory,s0_sim,s0_err,s12half_sim,\
         s12half_err,s012third_sim,s012third_err,bound,violates_two_setting,violates_one_setting"
    );
    assert_eq!(lines.count(), 9);
    let plot = fs::read_to_string(run.join("plotdata/sic.csv")).unwrap();
    assert_eq!(plot.lines().count(), 92);

    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(run.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["conditional_tomographies"], 18);
    assert!(report["convention"]
        .as_str()
        .unwrap()
        .contains("qwp-then-hwp"));

    let out = cohsteer(&["report", "--out", "run"], dir.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(run.join("summary.json").exists());
}

#[test]
fn measure_filter_limits_rows() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), 3);
    let out = cohsteer(
        &[
            "simulate",
            "--config",
            &cfg,
            "--measures",
            "sic",
            "--out",
            "run",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let tables = fs::read_to_string(dir.path().join("run/tables.csv")).unwrap();
    assert!(tables
        .lines()
        .skip(1)
        .all(|l| l.split(',').nth(1) == Some("sic")));
    assert_eq!(tables.lines().count(), 4);
}

#[test]
fn invalid_inputs_exit_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("empty.json"), r#"{"thetas": []}"#).unwrap();
    fs::write(
        dir.path().join("typo.json"),
        r#"{"thetas": [10], "sead": 4}"#,
    )
    .unwrap();
    fs::write(dir.path().join("range.json"), r#"{"visibility": 1.2}"#).unwrap();
    for cfg in ["empty.json", "typo.json", "range.json"] {
        let out = cohsteer(&["simulate", "--config", cfg, "--out", "x"], dir.path());
        assert_eq!(out.status.code(), Some(2), "{cfg}");
    }
    let out = cohsteer(&["theory", "--thetas", ""], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = cohsteer(&["theory", "--measures", "l2c"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let out = cohsteer(&["sigeur", "--n", "3"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_passes_and_fails_on_flipped_convention() {
    let dir = tempfile::tempdir().unwrap();
    let out = cohsteer(&["verify", "--samples", "200"], dir.path());
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    let out = cohsteer(
        &["verify", "--samples", "10", "--flip-convention"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("FAIL settings tables"), "{stdout}");
}

#[test]
fn theory_rows_at_45_degrees() {
    let dir = tempfile::tempdir().unwrap();
    let out = cohsteer(
        &[
            "theory",
            "--thetas",
            "45",
            "--measures",
            "l1c",
            "--out",
            "t",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let tables = fs::read_to_string(dir.path().join("t/tables.csv")).unwrap();
    assert_eq!(
        tables.lines().nth(1).unwrap(),
        "45.0000,l1c,0.0000,3.0000,2.0000,,,,,,,2.4495,true,false"
    );
}

#[test]
fn report_flags_tampered_verdicts() {
    let dir = tempfile::tempdir().unwrap();
    let out = cohsteer(&["theory", "--thetas", "45", "--out", "t"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let path = dir.path().join("t/tables.csv");
    let text = fs::read_to_string(&path)
        .unwrap()
        .replacen("true,false", "false,false", 1);
    fs::write(&path, text).unwrap();
    let out = cohsteer(&["report", "--out", "t"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}
