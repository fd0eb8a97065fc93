//! End-to-end runs of the `openqfi` binary.

use std::process::{Command, Output};

fn openqfi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_openqfi")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn qfi_grid_csv() {
    let o = openqfi(&["qfi", "--model", "kbody", "--grid", "N=1,3", "--grid", "x=0.1,0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("N,k,x,tau,M,F_exact,F_tilde,kappa"));
    assert_eq!(lines.len(), 5);
    assert!(lines[1..].iter().all(|l| l.ends_with(",ok")));
}

#[test]
fn qfi_writes_json_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let o = openqfi(&["qfi", "--model", "lossy", "--grid", "N=2,4", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let rows: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let rows = rows.as_array().expect("array of rows");
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1]["N"], 4);
    assert!(rows[0]["F_exact"].as_f64().unwrap() > 0.0);
}

#[test]
fn custom_model_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("qubit.json");
    std::fs::write(
        &path,
        r#"{"dimension": 2,
            "hamiltonian": [[[0.5, 0], [0, 0]], [[0, 0], [-0.5, 0]]],
            "initial_state": {"ket": [[1, 0], [1, 0]]},
            "parameter": {"kind": "constant", "value": 1.0, "duration": 2.0}}"#,
    )
    .unwrap();
    let o = openqfi(&["qfi", "--model", "custom", "--input", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    // σᶻ/2 on |+⟩: F = 4τ²·¼ = τ²
    let f = rows[0]["F_exact"].as_f64().unwrap();
    assert!((f - 4.0).abs() < 1e-10, "{f}");
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["qfi", "--model", "nope"][..],
        &["qfi", "--model", "kbody", "--grid", "N="][..],
        &["qfi", "--model", "kbody", "--grid", "gamma=1"][..],
        &["verify", "--model", "kbody"][..],
        &["figure2", "--grid", "N=0"][..],
        &["bogus"][..],
    ] {
        let o = openqfi(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn figure2_subset() {
    let o = openqfi(&["figure2", "--grid", "N=5,10,20", "--grid", "phi=0.7853981633974483"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 5);
    assert!(text.lines().last().unwrap().starts_with("# fit phi="));
}

#[test]
fn verify_dynamics_passes() {
    let o = openqfi(&["verify", "dynamics", "--seed", "3", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).lines().skip(1).all(|l| l.contains(",true,")));
}
