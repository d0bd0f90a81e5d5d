use std::path::Path;
use std::process::{Command, Output};

fn setquad(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_setquad"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn bound_prints_the_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let o = setquad(&["bound", "--knots", "midpoints:4"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0.0625\n");
}

#[test]
fn config_file_and_flags_combine() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("run.conf"),
        "# square-root modulus\nomega.kind = power\nomega.alpha = 0.5\nknots = midpoints:1\n",
    )
    .unwrap();
    let o = setquad(&["bound", "-c", "run.conf", "--knots", "midpoints:2"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!((v - 1.0 / 3.0).abs() < 1e-12, "{v}");
}

#[test]
fn recover_writes_the_method_body() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a.csv"), "0,0\n1,0\n").unwrap();
    std::fs::write(dir.path().join("b.csv"), "0,0\n").unwrap();
    let o = setquad(
        &[
            "recover",
            "--knots",
            "0.25,0.75",
            "--samples",
            "a.csv,b.csv",
            "--grid.size",
            "4",
            "--output.body",
            "phi.csv",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let body = std::fs::read_to_string(dir.path().join("phi.csv")).unwrap();
    assert_eq!(body, "direction_index,support_value\n0,0.5\n1,0.0\n2,0.0\n3,0.0\n");
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let args = |tag: &str| {
        vec![
            "knots".to_string(),
            "--knots".into(),
            "optimize:5".into(),
            "--weight.kind".into(),
            "polynomial".into(),
            "--weight.coeffs".into(),
            "0,1".into(),
            "--seed".into(),
            "11".into(),
            "--output.csv".into(),
            format!("knots_{tag}.csv"),
        ]
    };
    for tag in ["a", "b"] {
        let a = args(tag);
        let refs: Vec<&str> = a.iter().map(String::as_str).collect();
        assert_eq!(setquad(&refs, dir.path()).status.code(), Some(0));
    }
    let a = std::fs::read(dir.path().join("knots_a.csv")).unwrap();
    let b = std::fs::read(dir.path().join("knots_b.csv")).unwrap();
    assert_eq!(a, b);

    let run = |log: &str| {
        setquad(
            &["integrate", "--tol.integral", "1e-3", "--output.body", "body.csv", "--output.log", log],
            dir.path(),
        )
    };
    let (x, y) = (run("log_a.csv"), run("log_b.csv"));
    assert_eq!(stdout(&x), stdout(&y));
    assert_eq!(
        std::fs::read(dir.path().join("log_a.csv")).unwrap(),
        std::fs::read(dir.path().join("log_b.csv")).unwrap()
    );
}

#[test]
fn errors_leave_no_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = setquad(&["bound", "--knots", "0.7,0.2", "--output.cells", "cells.csv"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(!dir.path().join("cells.csv").exists());
    assert!(!o.stderr.is_empty());

    let o = setquad(&["noisy", "--knots", "0.5", "--epsilons", "0", "--samples", "missing.csv"], dir.path());
    assert_eq!(o.status.code(), Some(2));

    std::fs::write(dir.path().join("a.csv"), "1,2\n").unwrap();
    let o = setquad(&["noisy", "--knots", "0.5", "--epsilons", "0", "--output.body", "b.csv"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = setquad(
        &[
            "noisy",
            "--knots",
            "midpoints:2",
            "--epsilons",
            "0.1",
            "--samples",
            "a.csv,a.csv",
            "--output.cells",
            "cells.csv",
            "--output.body",
            "no/such/dir/body.csv",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(4));
    assert!(!dir.path().join("cells.csv").exists());

    let o = setquad(&["bound", "--no.such.key", "1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = setquad(&["bound", "--omega.kind", "power", "--omega.alpha", "2", "--knots", "0.5"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn integration_failure_is_reported_as_nonconvergence() {
    let dir = tempfile::tempdir().unwrap();
    let o = setquad(&["integrate", "--tol.integral", "1e-300", "--grid.size", "4"], dir.path());
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = setquad(&["selftest"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().all(|l| !l.starts_with("FAIL")));
}
