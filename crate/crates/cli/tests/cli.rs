use std::process::{Command, Output};

fn kaczmarz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kaczmarz"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = kaczmarz(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn csv_to_stdout() {
    let csv = stdout(&["partitions", "--resolution", "3", "--output", "-"]);
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("family,index,sets,points,expected_points,partition"));
    assert_eq!(lines.next(), Some("rings,,3,7,7,true"));
}

#[test]
fn json_carries_metadata_and_checks() {
    let json = stdout(&["lemma3", "--a-values", "4", "--format", "json", "--output", "-"]);
    assert!(json.contains("\"experiment\": \"lemma3\""));
    assert!(json.contains("\"empirical_constant\""));
    assert!(json.contains("\"constant_on_sets\""));
}

#[test]
fn check_summary_on_stderr() {
    let out = kaczmarz(&["verify-kernels", "--resolution", "4", "--output", "-"]);
    assert_eq!(out.status.code(), Some(0));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("PASS skvortsov"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(kaczmarz(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(kaczmarz(&["theorem1", "--p", "3/4", "--output", "-"]).status.code(), Some(2));
    assert_eq!(kaczmarz(&["theorem2", "--alpha-orders", "4,2", "--output", "-"]).status.code(), Some(2));
    assert_eq!(kaczmarz(&["theorem1", "--p", "zero"]).status.code(), Some(2));
    assert_eq!(
        kaczmarz(&["partitions", "--resolution", "12", "--max-resolution", "10"]).status.code(),
        Some(2)
    );
}

#[test]
fn io_errors_exit_one() {
    let dir = std::env::temp_dir().join(format!("kaczmarz-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let blocker = dir.join("file");
    std::fs::write(&blocker, b"x").unwrap();
    let target = blocker.join("report.csv");
    let out = kaczmarz(&["partitions", "--resolution", "2", "--output", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn bad_worker_count_is_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_kaczmarz"))
        .args(["partitions", "--resolution", "2", "--output", "-"])
        .env("KACZMARZ_WORKERS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
