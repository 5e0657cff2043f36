use std::process::{Command, Output};

fn rqisim(args: &[&str], out: &std::path::Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rqisim"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .unwrap()
}

#[test]
fn missing_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let run = rqisim(&["--config", "/nonexistent/run.json", "rate"], dir.path());
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn malformed_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, "{ not json").unwrap();
    let run = rqisim(&["--config", cfg.to_str().unwrap(), "rate"], dir.path());
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn off_grid_target_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let run = rqisim(&["tune", "--target", "1700"], dir.path());
    assert_eq!(run.status.code(), Some(3));
}

#[test]
fn csv_starts_with_fingerprint() {
    let dir = tempfile::tempdir().unwrap();
    let run = rqisim(&["fidelity"], dir.path());
    assert!(run.status.success());
    let text = std::fs::read_to_string(dir.path().join("fidelity.csv")).unwrap();
    let first = text.lines().next().unwrap();
    assert!(first.starts_with("# config-fingerprint: sha256:"));
    assert_eq!(first.len(), "# config-fingerprint: sha256:".len() + 64);
}
