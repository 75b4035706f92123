//! Black-box tests of the `qmeas` binary: exit codes, output files,
//! config-file precedence and cross-process determinism.

use std::path::Path;
use std::process::Command;

fn qmeas() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qmeas"))
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn all_scenarios_run_green() {
    let dir = tempfile::tempdir().unwrap();
    for scenario in ["nogo", "moments", "collapse", "interference", "decoherence"] {
        let out = dir.path().join(format!("{scenario}.json"));
        let status = qmeas()
            .args(["--scenario", scenario, "--events", "2000"])
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0), "scenario {scenario}");
        let report: serde_json::Value = serde_json::from_str(&read(&out)).unwrap();
        assert_eq!(report["scenario"], scenario);
        assert!(report["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
        // Full resolved config embedded for provenance.
        assert_eq!(report["config"]["seed"], 42);
        assert_eq!(report["config"]["events"], 2000);
    }
}

#[test]
fn stdout_mode_prints_report() {
    let output = qmeas()
        .args(["--scenario", "nogo", "--events", "10"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(report["scenario"], "nogo");
}

#[test]
fn csv_sidecar_written_for_both() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run.json");
    let status = qmeas()
        .args(["--scenario", "collapse", "--events", "50", "--format", "both"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let csv = read(&dir.path().join("run.csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("event,outcome_index,q"));
    assert_eq!(csv.lines().count(), 51);
}

#[test]
fn exit_codes_for_errors() {
    // Unknown scenario: configuration error.
    let status = qmeas().args(["--scenario", "nope"]).status().unwrap();
    assert_eq!(status.code(), Some(2));
    // Invalid alpha: configuration error.
    let status = qmeas()
        .args(["--scenario", "interference", "--alpha", "1.5"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    // Non-normalizable amplitudes: configuration error.
    let status = qmeas()
        .args(["--scenario", "nogo", "--a1", "1,0", "--a2", "1,0"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    // csv format without --out: configuration error.
    let status = qmeas()
        .args(["--scenario", "nogo", "--format", "csv"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
    // Unwritable output path: I/O error.
    let status = qmeas()
        .args(["--scenario", "nogo", "--events", "10"])
        .args(["--out", "/nonexistent-dir/report.json"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        "# moment-matching run\nscenario = moments\na1 = 0.6,0\na2 = 0.8,0\nevents = 500\nseed = 9\n",
    )
    .unwrap();
    let out = dir.path().join("a.json");
    let status = qmeas()
        .arg("--config")
        .arg(&cfg)
        .args(["--seed", "11"]) // flag beats file
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&read(&out)).unwrap();
    assert_eq!(report["scenario"], "moments");
    assert_eq!(report["config"]["seed"], 11);
    assert_eq!(report["config"]["events"], 500);
    assert_eq!(report["config"]["a1"][0], 0.6);

    // Unknown keys are rejected.
    std::fs::write(&cfg, "scenario = moments\nbogus = 1\n").unwrap();
    let status = qmeas().arg("--config").arg(&cfg).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &Path| {
        let mut cmd = qmeas();
        cmd.args([
            "--scenario",
            "interference",
            "--a1",
            "0.6,0",
            "--a2",
            "0,0.8",
            "--events",
            "4000",
            "--seed",
            "123",
            "--format",
            "both",
        ])
        .arg("--out")
        .arg(out);
        cmd
    };
    let out1 = dir.path().join("r1.json");
    let out2 = dir.path().join("r2.json");
    assert_eq!(args(&out1).status().unwrap().code(), Some(0));
    assert_eq!(args(&out2).status().unwrap().code(), Some(0));
    assert_eq!(read(&out1), read(&out2), "report payloads differ");
    assert_eq!(
        read(&dir.path().join("r1.csv")),
        read(&dir.path().join("r2.csv")),
        "csv sidecars differ"
    );
}

#[test]
fn near_normalized_amplitudes_accepted_with_warning() {
    let output = qmeas()
        .args([
            "--scenario",
            "nogo",
            "--a1",
            "0.7071,0",
            "--a2",
            "0.7071,0",
            "--events",
            "10",
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("warning"), "expected a normalization warning");
}

#[test]
fn scenario_reports_carry_expected_values() {
    let dir = tempfile::tempdir().unwrap();

    // nogo with four-digit symmetric amplitudes: infeasible, dimension 1.
    let out = dir.path().join("nogo.json");
    let status = qmeas()
        .args(["--scenario", "nogo", "--a1", "0.7071,0", "--a2", "0.7071,0"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&read(&out)).unwrap();
    assert_eq!(report["results"]["feasibility"]["verdict"], "infeasible");
    assert_eq!(report["results"]["feasibility"]["solution_dimension"], 1);

    // moments with a = (0.6, 0.8), order 3: analytic column (-0.28, 1, -0.28).
    let out = dir.path().join("moments.json");
    let status = qmeas()
        .args([
            "--scenario", "moments", "--a1", "0.6,0", "--a2", "0.8,0", "--moments", "3",
            "--events", "1000",
        ])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&read(&out)).unwrap();
    let analytic = report["results"]["pure"]["reference_moments"].as_array().unwrap();
    let expect = [-0.28, 1.0, -0.28];
    for (v, e) in analytic.iter().zip(expect) {
        assert!((v.as_f64().unwrap() - e).abs() < 1e-12);
    }

    // interference with symmetric amplitudes and a single event: undecided.
    let out = dir.path().join("interference.json");
    let status = qmeas()
        .args(["--scenario", "interference", "--events", "1"])
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&read(&out)).unwrap();
    assert_eq!(report["results"]["discrimination"]["decision"], "undecided");
}
