use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qpn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qpn"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn example(dir: &Path) -> String {
    let path = dir.join("tt.qpn");
    let out = qpn(&["example", "test-treat"]);
    assert!(out.status.success());
    fs::write(&path, &out.stdout).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn strategies_prints_eight() {
    let dir = tempfile::tempdir().unwrap();
    let file = example(dir.path());
    let out = qpn(&["strategies", &file]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("== strategies (8)"));
}

#[test]
fn admissible_lists_three_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let file = example(dir.path());
    let args = ["admissible", file.as_str(), "--mixed", "--samples", "2000", "--seed", "42"];
    let out = qpn(&args);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let section: Vec<&str> = text
        .split("\nadmissible: ")
        .nth(1)
        .unwrap()
        .lines()
        .take_while(|l| !l.is_empty())
        .collect();
    assert_eq!(section[0], "3");
    for want in ["t=~T, x=~X", "t=~T, x=X", "t=T, x=X iff r=R"] {
        assert!(section.iter().any(|l| l.trim() == want), "{text}");
    }
    assert_eq!(qpn(&args).stdout, out.stdout);
}

#[test]
fn empty_file_has_no_value_node() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.qpn");
    fs::write(&path, "").unwrap();
    let out = qpn(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no value node"));
}

#[test]
fn syntax_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.qpn");
    fs::write(&path, "var a : chance\nvar u : value\ninfluence a => u : +\n").unwrap();
    let out = qpn(&["reduce", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
}

#[test]
fn usage_errors_exit_three() {
    assert_eq!(qpn(&["bogus"]).status.code(), Some(3));
    assert_eq!(qpn(&["example", "nope"]).status.code(), Some(3));
    assert_eq!(qpn(&["validate", "/no/such/file"]).status.code(), Some(3));
    assert_eq!(qpn(&["--help"]).status.code(), Some(0));
}

#[test]
fn reduce_and_order_write_dot() {
    let dir = tempfile::tempdir().unwrap();
    let file = example(dir.path());
    let net_dot = dir.path().join("net.dot");
    let out = qpn(&["reduce", &file, "--dot", net_dot.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("reverse-arc d -> r"));
    let dot = fs::read_to_string(&net_dot).unwrap();
    assert!(dot.contains("style=dashed") && dot.contains("shape=hexagon"));

    let order_dot = dir.path().join("order.dot");
    let out = qpn(&["order", &file, "--node", "r", "--dot", order_dot.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(fs::read_to_string(&order_dot).unwrap().starts_with("digraph order"));
    assert_eq!(qpn(&["order", &file, "--node", "nope"]).status.code(), Some(3));
}

#[test]
fn verify_reports_no_violations() {
    let dir = tempfile::tempdir().unwrap();
    let file = example(dir.path());
    let out = qpn(&["verify", &file, "--samples", "100", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}
