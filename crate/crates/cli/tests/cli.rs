use std::path::Path;
use std::process::{Command, Output};

fn steiner(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_steiner")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn construct_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("s16.txt");
    let o = steiner(&["construct", "sqs", "--order", "16", "--seed", "1", "--out", p(&f)]);
    assert_eq!(o.status.code(), Some(0));
    let o = steiner(&["verify", p(&f)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "OK sqs v=16 blocks=140");
}

#[test]
fn identical_invocations_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.txt");
    let b = dir.path().join("b.txt");
    for f in [&a, &b] {
        let o = steiner(&["construct", "sqs", "--order", "20", "--seed", "7", "--out", p(f)]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn corrupted_design_fails_with_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("s8.txt");
    assert_eq!(steiner(&["construct", "sqs", "--order", "8", "--out", p(&f)]).status.code(), Some(0));
    let text = std::fs::read_to_string(&f).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    lines[1] = "0 1 2 4";
    std::fs::write(&f, lines.join("\n") + "\n").unwrap();
    let o = steiner(&["verify", p(&f)]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.starts_with("FAIL "), "{out}");
    assert!(out.contains("witnesses={"), "{out}");
}

#[test]
fn malformed_file_is_invalid() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("bad.txt");
    std::fs::write(&f, "#design kind=sqs v=8\n0 1 2\n").unwrap();
    assert_eq!(steiner(&["verify", p(&f)]).status.code(), Some(1));
}

#[test]
fn plan_exit_codes() {
    let o = steiner(&["plan", "--order", "26", "--kind", "sqs"]);
    assert_eq!(o.status.code(), Some(3));
    let all = format!("{}{}", stdout(&o), String::from_utf8_lossy(&o.stderr));
    assert!(all.contains("3n−4"), "{all}");
    assert_eq!(steiner(&["plan", "--order", "50", "--kind", "sqs"]).status.code(), Some(3));
    let o = steiner(&["plan", "--order", "64", "--kind", "sqs"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("BASE sqs(8)"));
    assert_eq!(steiner(&["plan", "--order", "12", "--kind", "s46"]).status.code(), Some(0));
}

#[test]
fn usage_errors() {
    assert_eq!(steiner(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(steiner(&["plan"]).status.code(), Some(2));
    assert_eq!(steiner(&["construct", "sqs", "--order", "9", "--out", "/dev/null"]).status.code(), Some(2));
    assert_eq!(steiner(&["verify", "/nonexistent/file.txt"]).status.code(), Some(2));
}

#[test]
fn construct_unreachable_and_timeout() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("x.txt");
    assert_eq!(steiner(&["construct", "sqs", "--order", "50", "--out", p(&f)]).status.code(), Some(3));
    let o = steiner(&["construct", "sqs", "--order", "34", "--budget", "1000", "--out", p(&f)]);
    assert_eq!(o.status.code(), Some(4));
    assert!(!f.exists());
}

#[test]
fn holes_mode_writes_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("h130.txt");
    let o = steiner(&["construct", "sqs", "--order", "130", "--holes", "--out", p(&f)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let sidecar = std::fs::read_to_string(dir.path().join("h130.txt.holes")).unwrap();
    assert!(sidecar.starts_with("#holes count=4\n"));
    let o = steiner(&["verify", p(&f)]);
    assert_eq!(stdout(&o).trim(), "OK partial v=130 blocks=83456");
    let o = steiner(&["stats", p(&f)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("R1=53760 R2=6656 R3=23040"));
}

#[test]
fn complete_mode_from_file_input() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("s130.txt");
    let input = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/tests/data/sqs34.txt");
    let o = steiner(&["construct", "sqs", "--order", "130", "--input", input, "--out", p(&f), "--threads", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = steiner(&["verify", p(&f), "--threads", "2"]);
    assert_eq!(stdout(&o).trim(), "OK sqs v=130 blocks=89440");
}

#[test]
fn counts() {
    let o = steiner(&["count", "--object", "sqs", "--order", "8"]);
    assert_eq!(stdout(&o).trim(), "sqs order=8 count=30");
    let o = steiner(&["count", "--object", "quasigroup3", "--order", "2"]);
    assert_eq!(stdout(&o).trim(), "quasigroup3 order=2 count=2");
    let o = steiner(&["count", "--object", "bbd", "--order", "2"]);
    assert_eq!(stdout(&o).trim(), "bbd order=2 count=1");
    assert_eq!(steiner(&["count", "--object", "sqs", "--order", "14"]).status.code(), Some(2));
}

#[test]
fn stats_reports_formulas() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("s32.txt");
    assert_eq!(steiner(&["construct", "sqs", "--order", "32", "--out", p(&f)]).status.code(), Some(0));
    let o = steiner(&["stats", p(&f)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("blocks: 1240 (formula 1240) match"));
}
