use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qctwistor")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

#[test]
fn passing_suites_exit_zero() {
    let out = run(&["verify-algebra", "--trials", "5"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["suite"], "algebra");
    assert_eq!(report["summary"]["fail"], 0);

    let out = run(&["verify-model", "--trials", "5", "--format", "text"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn broken_embedding_exits_one() {
    let out = run(&["verify-algebra", "--trials", "5", "--inject-phi-fault"]);
    assert_eq!(code(&out), 1);
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let checks = report["checks"].as_array().unwrap();
    let hom = checks.iter().find(|c| c["name"] == "phi_homomorphism").unwrap();
    assert_eq!(hom["status"], "fail");
    assert!(hom["counterexample"].is_string());
}

#[test]
fn degenerate_step_reports_warnings_and_fails() {
    let out = run(&["verify-model", "--trials", "3", "--fd-step", "1e-30"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate"));
}

#[test]
fn invalid_configuration_exits_two() {
    assert_eq!(code(&run(&["verify-algebra", "--n", "9"])), 2);
    assert_eq!(code(&run(&["verify-algebra", "--n", "0"])), 2);
    assert_eq!(code(&run(&["verify-model", "--fd-step", "-1"])), 2);
    assert_eq!(code(&run(&["verify-model", "--bogus"])), 2);
    assert_eq!(code(&run(&["bracket-table", "--n", "5"])), 2);
}

#[test]
fn identical_runs_are_byte_identical() {
    let args = ["all", "--seed", "11", "--trials", "4"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn report_written_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.csv");
    let out = run(&["verify-algebra", "--trials", "2", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.lines().count() > 10);
}

#[test]
fn bracket_table_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for format in ["csv", "json"] {
        let path = dir.path().join(format!("table.{format}"));
        let p = path.to_str().unwrap();
        assert_eq!(code(&run(&["bracket-table", "--format", format, "--out", p])), 0);
        let out = run(&["bracket-table", "--format", format, "--verify", p]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn tampered_bracket_table_fails() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.csv");
    let p = path.to_str().unwrap();
    assert_eq!(code(&run(&["bracket-table", "--out", p])), 0);
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_owned).collect();
    let mut fields: Vec<String> = lines[1].split(',').map(str::to_owned).collect();
    fields[3] = format!("{}1", fields[3]);
    lines[1] = fields.join(",");
    std::fs::write(&path, lines.join("\n")).unwrap();
    assert_eq!(code(&run(&["bracket-table", "--verify", p])), 1);

    std::fs::write(&path, "not,a,table\n").unwrap();
    assert_eq!(code(&run(&["bracket-table", "--verify", p])), 2);
}
