use std::path::Path;
use std::process::{Command, Output};

fn pnp(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pnp"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

const SMALL: &str = "problem.n = 24\nproblem.angles = 12\nproblem.rays = 35\nsolver.algorithm = fbs_pnp\nsolver.max_iters = 15\n";

#[test]
fn lists_presets() {
    let dir = tempfile::tempdir().unwrap();
    let out = pnp(&["run", "--list-presets"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "example1_weak"));
    assert!(text.lines().any(|l| l == "example4_precond"));
}

#[test]
fn runs_configs_concurrently_into_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("a.conf"), SMALL).unwrap();
    std::fs::write(
        dir.path().join("b.conf"),
        format!("{SMALL}denoiser.kind = median\ndenoiser.sigma = 0.1\n"),
    )
    .unwrap();
    let out = pnp(&["run", "a.conf", "b.conf", "--output-dir", "res"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for name in ["a", "b"] {
        for suffix in ["trace.csv", "summary.csv", "summary.txt"] {
            assert!(dir.path().join("res").join(format!("{name}_{suffix}")).is_file());
        }
        let trace = std::fs::read_to_string(dir.path().join(format!("res/{name}_trace.csv"))).unwrap();
        assert_eq!(trace.lines().count(), 16);
        assert!(!trace.contains('\r'));
    }
}

#[test]
fn seed_override_changes_the_data() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("s.conf"), SMALL).unwrap();
    let read = |sub: &str| std::fs::read_to_string(dir.path().join(sub).join("s_trace.csv")).unwrap();
    assert!(pnp(&["run", "s.conf", "--output-dir", "x", "--seed", "1"], dir.path()).status.success());
    assert!(pnp(&["run", "s.conf", "--output-dir", "y", "--seed", "1"], dir.path()).status.success());
    assert!(pnp(&["run", "s.conf", "--output-dir", "z", "--seed", "2"], dir.path()).status.success());
    assert_eq!(read("x"), read("y"));
    assert_ne!(read("x"), read("z"));
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.conf"), "problem.n = 24\nsolver.speed = 3\n").unwrap();
    let out = pnp(&["run", "bad.conf"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2") && err.contains("solver.speed"), "{err}");

    assert_eq!(pnp(&["run", "missing.conf"], dir.path()).status.code(), Some(2));
    assert_eq!(pnp(&["run", "--preset", "nope"], dir.path()).status.code(), Some(2));
    assert_eq!(pnp(&["run"], dir.path()).status.code(), Some(2));
}

#[test]
fn keys_lists_required_fields() {
    let dir = tempfile::tempdir().unwrap();
    let out = pnp(&["keys"], dir.path());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("problem.n") && text.contains("solver.algorithm"));
}
