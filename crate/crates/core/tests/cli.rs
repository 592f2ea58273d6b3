use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mirrorflow::runner::read_numeric_csv;

const NOISY: &str = "\
problem.kind = quadratic
problem.center = 0.5, 0.2
region.kind = box
region.lower = 0, 0
region.upper = 1, 1
mirror.kind = euclidean
noise.kind = isotropic
noise.sigma = 0.2
integrator.dt = 1e-3
integrator.horizon = 5
integrator.log_stride = 10
ensemble.paths = 16
ensemble.trajectories = 2
diagnostics.audit = true
";

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn mirrorflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mirrorflow"))
        .args(args)
        .output()
        .unwrap()
}

fn run_ok(args: &[&str]) -> Output {
    let out = mirrorflow(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("run.cfg");
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn same_files(a: &Path, b: &Path, names: &[&str]) {
    for n in names {
        assert_eq!(
            fs::read(a.join(n)).unwrap(),
            fs::read(b.join(n)).unwrap(),
            "{n} differs"
        );
    }
}

fn echo_value(dir: &Path, key: &str) -> f64 {
    let text = fs::read_to_string(dir.join("config.echo")).unwrap();
    text.lines()
        .find_map(|l| {
            l.strip_prefix(key)?
                .trim_start()
                .strip_prefix('=')
                .map(|v| v.trim().parse().unwrap())
        })
        .unwrap_or_else(|| panic!("{key} missing from config.echo"))
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), NOISY);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run_ok(&["simulate", &cfg, "--out", a.to_str().unwrap(), "--threads", "1"]);
    run_ok(&["simulate", &cfg, "--out", b.to_str().unwrap(), "--threads", "4"]);
    same_files(&a, &b, &["trajectory_0.csv", "trajectory_1.csv", "summary.csv"]);

    let c = tmp.path().join("c");
    run_ok(&["simulate", &cfg, "--out", c.to_str().unwrap(), "--seed", "7"]);
    assert_ne!(
        fs::read(a.join("summary.csv")).unwrap(),
        fs::read(c.join("summary.csv")).unwrap()
    );
}

#[test]
fn config_echo_reproduces_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), NOISY);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    run_ok(&["simulate", &cfg, "--out", a.to_str().unwrap()]);
    let echo = a.join("config.echo");
    run_ok(&["simulate", echo.to_str().unwrap(), "--out", b.to_str().unwrap()]);
    same_files(&a, &b, &["trajectory_0.csv", "trajectory_1.csv", "summary.csv"]);
}

#[test]
fn step_larger_than_horizon_exits_2_naming_dt() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        &NOISY.replace("integrator.horizon = 5", "integrator.horizon = 1e-4"),
    );
    let out = mirrorflow(&["simulate", &cfg, "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("integrator.dt"));
}

#[test]
fn unknown_key_and_missing_file_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &format!("{NOISY}integrator.dtt = 1\n"));
    let out = mirrorflow(&["simulate", &cfg]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("integrator.dtt"));

    let out = mirrorflow(&["simulate", tmp.path().join("absent.cfg").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_suite_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = mirrorflow(&["acceptance", "no-such-suite", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no-such-suite"));
}

#[test]
fn traffic_demo_rejects_other_problems() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), NOISY);
    let out = mirrorflow(&["traffic-demo", &cfg, "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn deterministic_average_gap_is_below_omega_over_t() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = configs().join("deterministic_box.cfg");
    run_ok(&["simulate", cfg.to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    let omega = echo_value(tmp.path(), "derived.Omega");
    let eta = echo_value(tmp.path(), "schedule.eta0");
    let (header, rows) = read_numeric_csv(&tmp.path().join("trajectory_0.csv")).unwrap();
    let (t, f_avg) = (0, header.iter().position(|h| h == "f_avg").unwrap());
    // the minimizer is interior, so f* = 0
    for row in rows.iter().filter(|r| r[t] >= 0.1) {
        assert!(
            row[f_avg] <= omega / (eta * row[t]),
            "t = {}: {} > Ω/t",
            row[t],
            row[f_avg]
        );
    }
}

#[test]
fn traffic_demo_writes_gap_series() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = configs().join("traffic_file.cfg");
    let out = run_ok(&[
        "traffic-demo",
        cfg.to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("network_paths"), "{stdout}");
    for f in [
        "trajectory_0.csv",
        "summary.csv",
        "network.txt",
        "gap_series.csv",
        "config.echo",
    ] {
        assert!(tmp.path().join(f).is_file(), "{f} missing");
    }
    let (header, rows) = read_numeric_csv(&tmp.path().join("gap_series.csv")).unwrap();
    assert_eq!(header, ["t", "raw_gap", "rectified_gap"]);
    assert!(rows.iter().all(|r| r[1] >= -1e-12 && r[2] >= -1e-12));
    let (first, last) = (&rows[0], rows.last().unwrap());
    assert!(last[2] < 0.1 * first[2], "rectified gap {} -> {}", first[2], last[2]);
}
