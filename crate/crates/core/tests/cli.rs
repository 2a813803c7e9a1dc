use std::path::Path;
use std::process::{Command, Output};

use hindman::principles::{coloring_from_text, solution_from_text};

fn hindman(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hindman"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn reduce_solve_pullback_roundtrip() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let r = hindman(
        d,
        &[
            "reduce",
            "--id",
            "color-doubling",
            "--rule",
            "mod 2 0,1",
            "--out",
            "g.txt",
        ],
    );
    assert!(r.status.success(), "{}", stdout(&r));
    let g = coloring_from_text(&std::fs::read_to_string(d.join("g.txt")).unwrap()).unwrap();
    assert_eq!(g.colors(), 4);

    let s = hindman(
        d,
        &[
            "solve", "--len", "<=2", "--colors", "4", "--in", "g.txt", "--size", "3", "--out",
            "s.txt",
        ],
    );
    assert!(s.status.success(), "{}", stdout(&s));
    let text = std::fs::read_to_string(d.join("s.txt")).unwrap();
    let sol = solution_from_text(&text).unwrap();
    assert_eq!(hindman::principles::solution_to_text(&sol), text);

    let p = hindman(
        d,
        &[
            "pullback",
            "--id",
            "color-doubling",
            "--rule",
            "mod 2 0,1",
            "--solution",
            "s.txt",
        ],
    );
    assert_eq!(p.status.code(), Some(0), "{}", stdout(&p));
    assert!(stdout(&p).contains("verify: valid"));
}

#[test]
fn repeated_runs_print_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "certify",
        "--id",
        "ipt-from-ht-eq2",
        "--count",
        "12",
        "--size",
        "5",
        "--max-exp",
        "12",
        "--jobs",
        "2",
    ];
    let a = hindman(dir.path(), &args);
    let b = hindman(dir.path(), &args);
    assert_eq!(a.status.code(), Some(0), "{}", stdout(&a));
    assert_eq!(stdout(&a), stdout(&b));
    assert!(!stdout(&a).contains("elapsed"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let bad = hindman(
        d,
        &[
            "certify",
            "--id",
            "fixture-corrupted",
            "--count",
            "10",
            "--max-exp",
            "10",
        ],
    );
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("counterexample"));
    assert_eq!(
        hindman(d, &["solve", "--len", "<=0", "--rule", "constant 0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(hindman(d, &["catalog"]).status.code(), Some(0));
}
