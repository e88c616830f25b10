use std::process::{Command, Output};

fn linvar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_linvar"))
        .current_dir(concat!(env!("CARGO_MANIFEST_DIR"), "/../../descriptions"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn linearizable_final_example() {
    let o = linvar(&["linearizable", "final_example.desc"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("target  g = (1, t^3)"));
}

#[test]
fn eq_no_on_unit_interval() {
    let o = linvar(&["check-realizable", "eq_no.desc", "--interval", "0", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("condition (ii) fails at t = 1"));
    let o = linvar(&["check-realizable", "eq_no.desc", "--interval", "0", "0.9"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn ex3_series_table() {
    let o = linvar(&["series", "ex3.desc", "--free", "1", "0.5", "--order", "20"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("command  series ex3.desc --order 20 --free 1 1/2"));
    assert!(out.lines().any(|l| l.split_whitespace().collect::<Vec<_>>() == ["20", "1/2432902008176640000"]));
}

#[test]
fn json_output() {
    let o = linvar(&["map-to", "final_example.desc", "final_target.desc", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.trim_start().starts_with('{'));
    assert!(out.contains("\"status\": \"pass\""));
}

#[test]
fn negative_point_flag() {
    let o = linvar(&["series", "ex3.desc", "--point", "-1/2", "--order", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("series at t = -1/2"));
    let o = linvar(&["series", "ex3.desc", "--free", "1", "-1/2", "--order", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("--order 4 --free 1 -1/2"));
}

#[test]
fn input_errors_exit_3() {
    for args in [
        vec!["linearizable", "missing.desc"],
        vec!["series", "ex3.desc", "--free", "0.1.2"],
        vec!["invariants", "ex3.desc"],
        vec!["frobnicate"],
        vec!["check-realizable", "eq_no.desc", "--interval", "1", "0"],
    ] {
        let o = linvar(&args);
        assert_eq!(o.status.code(), Some(3), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn help_exits_cleanly() {
    let o = linvar(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("map-to"));
}
