use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn proxlab(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_proxlab"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const ROTATION: &str = r#"{
  "operator": "rotation2",
  "x0": [1, 0],
  "schedule": {"lambda": 1, "c": 1},
  "iterations": 30,
  "certificates": [{"theorem_id": "Prop5_1", "kappa": 1}, {"theorem_id": "Thm5_10", "kappa": 1}]
}"#;

#[test]
fn run_writes_outputs_and_passes() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("rot.json"), ROTATION).unwrap();
    let out = proxlab(&["run", "rot.json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("PASS Prop5_1"));
    assert!(text.contains("PASS Thm5_10"));
    let res = dir.path().join("rot-out");
    for f in ["trace.csv", "certificates.json", "verification.json", "report.json"] {
        assert!(res.join(f).is_file(), "missing {f}");
    }
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(res.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["overall"], true);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{
      "operator": "abs:3",
      "x0": {"center": [0, 0, 0], "radius": 4},
      "schedule": {"lambda": [0.5, 1.5], "c": 1, "eta": 1, "error": {"relative": 0.05}},
      "iterations": 40,
      "seed": 11,
      "certificates": [{"theorem_id": "Thm5_8", "alpha": 0.01, "tau": 0.5}],
      "subregularity": {"delta": 0.5, "samples": 200}
    }"#;
    fs::write(dir.path().join("abs.json"), cfg).unwrap();
    for out in ["a", "b"] {
        let o = proxlab(&["run", "abs.json", "--out", out], dir.path());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let mut names: Vec<_> = fs::read_dir(dir.path().join("a"))
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert!(!names.is_empty());
    for n in names {
        assert_eq!(
            fs::read(dir.path().join("a").join(&n)).unwrap(),
            fs::read(dir.path().join("b").join(&n)).unwrap(),
            "{n:?} differs"
        );
    }
}

#[test]
fn failing_certificate_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    // kappa understated: the rotation's true modulus is 1, so the claimed rate is too fast
    let cfg = ROTATION.replace(
        r#""theorem_id": "Prop5_1", "kappa": 1"#,
        r#""theorem_id": "Prop5_1", "kappa": 0.5"#,
    );
    fs::write(dir.path().join("rot.json"), cfg).unwrap();
    let out = proxlab(&["run", "rot.json"], dir.path());
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("FAIL Prop5_1"));
}

#[test]
fn config_errors_exit_2_with_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ROTATION.replace(r#""lambda": 1"#, r#""lambda": 2"#);
    fs::write(dir.path().join("bad.json"), cfg).unwrap();
    let out = proxlab(&["run", "bad.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("certificates[0]"), "{}", stderr(&out));

    fs::write(
        dir.path().join("typo.json"),
        ROTATION.replace("iterations", "iterationz"),
    )
    .unwrap();
    let out = proxlab(&["run", "typo.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));

    let out = proxlab(&["run", "missing.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_passes_and_filters() {
    let dir = tempfile::tempdir().unwrap();
    let out = proxlab(&["verify", "--samples", "500"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 7);
    assert!(text.lines().all(|l| l.starts_with("PASS ")));

    let out = proxlab(&["verify", "--only", "tight-rates"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 1);
    assert!(stdout(&out).contains("tight-rates"));

    let out = proxlab(&["verify", "--only", "nonsense"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn corrupted_matrix_fails_resolvent_axioms() {
    let dir = tempfile::tempdir().unwrap();
    // symmetric part has a negative eigenvalue
    fs::write(dir.path().join("m.txt"), "1 0\n0 -0.5\n").unwrap();
    let out = proxlab(
        &["verify", "--operator", "linear:m.txt", "--samples", "500"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(3));
    assert!(
        stderr(&out).contains("verification failed: resolvent-axioms"),
        "{}",
        stderr(&out)
    );
    let text = stdout(&out);
    let line = text.lines().find(|l| l.contains("resolvent-axioms")).unwrap();
    assert!(
        line.starts_with("FAIL") && line.contains("firm nonexpansiveness"),
        "{line}"
    );
}

#[test]
fn rates_and_estimate_commands() {
    let dir = tempfile::tempdir().unwrap();
    let out = proxlab(&["rates", "Thm5_10", "--params", "lambda=1,kappa=1,c=1"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("7.50000000000000000e-1"), "{}", stdout(&out));

    let out = proxlab(
        &["rates", "Thm5_6", "--params", "lambda=2,kappa=1,c=1,eta=1,eps=0.1"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));

    let out = proxlab(
        &["estimate-kappa", "scalar:2", "--delta", "1", "--samples", "2000"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let est: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!((est["kappa_hat"].as_f64().unwrap() - 0.5).abs() <= 1e-9);

    let out = proxlab(&["estimate-kappa", "cubic", "--delta", "0.1"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let est: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(est["kappa_hat"], "divergent");
}
