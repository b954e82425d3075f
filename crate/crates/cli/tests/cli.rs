use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_emitcorr"))
}

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    binary().args(args).output().expect("binary runs")
}

fn write_file(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn evolve_writes_a_rectangular_csv() {
    let path = scenario("sudden_birth.toml");
    let out = run(&["evolve", path.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,MI,CC,QD,C,EoF,theta_m,phi_m"));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 401);
    assert!(rows.iter().all(|r| r.len() == 8));
    // concurrence is zero at first and positive by the end
    assert_eq!(rows[0][4], 0.0);
    assert!(rows.last().unwrap()[4] > 0.0);
}

#[test]
fn output_is_byte_identical_across_runs_and_destinations() {
    let dir = tempfile::tempdir().unwrap();
    let path = scenario("driven_doubly_excited.toml");
    let first = run(&["evolve", path.to_str().unwrap()]);
    let second = run(&["evolve", path.to_str().unwrap()]);
    assert_eq!(first.stdout, second.stdout);
    let file = dir.path().join("out.csv");
    let status = run(&[
        "evolve",
        path.to_str().unwrap(),
        "-o",
        file.to_str().unwrap(),
    ]);
    assert!(status.status.success());
    assert!(status.stdout.is_empty());
    assert_eq!(std::fs::read(&file).unwrap(), first.stdout);
}

#[test]
fn scan_output_does_not_depend_on_thread_count() {
    let path = scenario("alpha_scan.toml");
    let serial = binary()
        .args(["scan", path.to_str().unwrap()])
        .env("EC_THREADS", "1")
        .output()
        .unwrap();
    let parallel = binary()
        .args(["scan", path.to_str().unwrap()])
        .env("EC_THREADS", "4")
        .output()
        .unwrap();
    assert!(serial.status.success());
    assert_eq!(serial.stdout, parallel.stdout);
    let text = String::from_utf8(serial.stdout).unwrap();
    assert!(text.starts_with("alpha,t,MI,"));
    assert_eq!(text.lines().count(), 1 + 11 * 51);
}

#[test]
fn distance_scan_uses_default_range() {
    let out = run(&["scan", scenario("distance_scan.toml").to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let first_column: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(first_column.first(), Some(&0.1));
    assert_eq!(first_column.last(), Some(&0.4));
}

#[test]
fn couplings_reports_the_eighth_wavelength_ratios() {
    let out = run(&[
        "couplings",
        scenario("eighth_wavelength.toml").to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let value = |key: &str| -> f64 {
        text.lines()
            .find_map(|l| l.strip_prefix(key))
            .unwrap()
            .trim()
            .parse()
            .unwrap()
    };
    let v = value("V/Gamma =");
    let gamma = value("gamma/Gamma =");
    assert!((1.0 / v - 0.7818).abs() < 0.02 * 0.7818);
    assert!((gamma / v - 0.6884).abs() < 0.02 * 0.6884);
    assert!((value("z =") - std::f64::consts::FRAC_PI_4).abs() < 1e-6);
}

#[test]
fn validation_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let too_fast = write_file(
        &dir,
        "bad.toml",
        "t_final = 1.0\nsamples = 3\n[initial]\nkind = \"ground\"\n[params]\ngamma = 1.5\n",
    );
    let two_states = write_file(
        &dir,
        "two.toml",
        "t_final = 1.0\nsamples = 3\n[initial]\nkind = \"ground\"\nalpha = 0.5\n",
    );
    for args in [
        vec!["evolve", too_fast.to_str().unwrap()],
        vec!["evolve", two_states.to_str().unwrap()],
        vec!["evolve", "/nonexistent/scenario.toml"],
        vec!["scan", scenario("sudden_birth.toml").to_str().unwrap()],
        vec!["verify", "--filter", "no such criterion"],
        vec!["frobnicate"],
    ] {
        let out = run(&args);
        assert_eq!(
            out.status.code(),
            Some(1),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stderr.is_empty());
    }
    let threads = binary()
        .args([
            "couplings",
            scenario("eighth_wavelength.toml").to_str().unwrap(),
        ])
        .env("EC_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(threads.status.code(), Some(1));
}

#[test]
fn numerical_failures_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_file(
        &dir,
        "overflow.toml",
        "t_final = 1.0\nsamples = 3\n[initial]\nkind = \"doubly_excited\"\n[params]\nell1 = 1e200\n",
    );
    let out = run(&["evolve", path.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn verify_reports_each_check() {
    let out = run(&["verify", "--filter", "coupling"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("PASS criterion  2 coupling_formulas"));
    assert!(text.contains("expected 2.03, got 2.0304"));
}

#[test]
fn failing_verify_exits_with_three() {
    // the correlation hierarchy is violated at early times on the reference grid
    let out = run(&["verify", "--filter", "hierarchy"]);
    assert_eq!(out.status.code(), Some(3));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("FAIL criterion  4 hierarchy"));
    assert!(text.contains("FAIL max (CC - QD)"));
}
