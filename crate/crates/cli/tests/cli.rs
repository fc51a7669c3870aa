use std::path::Path;
use std::process::{Command, Output};

fn degenlab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_degenlab"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("DEGENLAB_THREADS")
        .env_remove("SOURCE_DATE_EPOCH")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn malformed_theta_is_config_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let o = degenlab(&["elliptic-solve", "--set", "theta=abc"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("theta"));
    assert!(!dir.path().join("report.json").exists());
}

#[test]
fn unknown_key_is_config_invalid() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&degenlab(&["heat-kernel", "--set", "tehta=1"], dir.path())), 2);
}

#[test]
fn nan_value_is_config_invalid() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&degenlab(&["heat-kernel", "--set", "a=NaN"], dir.path())), 2);
}

#[test]
fn unknown_command_and_bad_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&degenlab(&["elliptic"], dir.path())), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_degenlab"))
        .args(["heat-kernel", "--out"])
        .arg(dir.path())
        .env("DEGENLAB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}

#[test]
fn endpoint_theta_is_config_invalid() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&degenlab(&["elliptic-solve", "--set", "theta=4"], dir.path())), 2);
}

#[test]
fn missing_config_file_is_io_failure() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent.cfg");
    assert_eq!(code(&degenlab(&["heat-kernel", "--config", missing.to_str().unwrap()], dir.path())), 4);
}

#[test]
fn failing_verdict_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = degenlab(&["elliptic-solve", "--set", "residual_tolerance=1e-30"], dir.path());
    assert_eq!(code(&o), 1);
    let report = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
    assert!(report.contains("\"pass\": false"));
}

#[test]
fn config_file_then_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# reference operator\nc = 4\ntheta = 6\n").unwrap();
    let out = dir.path().join("out");
    let o = degenlab(&["elliptic-solve", "--config", cfg.to_str().unwrap(), "--set", "theta=-6"], &out);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let report = std::fs::read_to_string(out.join("report.json")).unwrap();
    assert!(report.contains("\"theta\": \"-6\""), "{report}");
}

#[test]
fn identical_config_gives_identical_bytes() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    for d in [&a, &b] {
        assert_eq!(code(&degenlab(&["heat-kernel", "--set", "timestamp=1700000000"], d.path())), 0);
    }
    for name in ["report.json", "heat_kernel.csv"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name}");
    }
    let report = std::fs::read_to_string(a.path().join("report.json")).unwrap();
    assert!(report.contains("2023-11-14T22:13:20Z"));
    assert!(report.contains("\"schema_version\": 1"));
}

#[test]
fn sweep_csv_header_order() {
    let dir = tempfile::tempdir().unwrap();
    let o = degenlab(&["sweep-theta", "--set", "theta_step=1", "--set", "corpus_size=3"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("theta,N_hat,solver_status"));
    let statuses: Vec<&str> = lines.map(|l| l.rsplit(',').next().unwrap()).collect();
    assert!(statuses.contains(&"endpoint") && statuses.contains(&"divergent") && statuses.contains(&"finite"));
}

#[test]
fn large_lambda_sweep_is_finite() {
    let dir = tempfile::tempdir().unwrap();
    let o =
        degenlab(&["sweep-theta", "--set", "lambda=10", "--set", "theta_step=1", "--set", "corpus_size=3"], dir.path());
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",finite")), "{csv}");
}

#[test]
fn empty_corpus_is_config_invalid() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&degenlab(&["sweep-theta", "--set", "corpus_size=0"], dir.path())), 2);
}
