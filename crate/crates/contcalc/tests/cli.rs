use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const DECLS: &str = "\
# lists and friends
mu List(A) = 1 + A * rec
mu Nat() = 1 + rec
mu Z() = 0
nu CoNat() = 1 + rec
nu CoList(A) = 1 + A * rec
mu Bin(A) = A + [2] -> rec
";

const MACHINES: &str = "\
machine inf
i : shape inr unit ; unit -> i
machine inf2
a : shape inr unit ; unit -> b
b : shape inr unit ; unit -> a
machine three
n0 : shape inr unit ; unit -> n1
n1 : shape inr unit ; unit -> n2
n2 : shape inr unit ; unit -> n3
n3 : shape inl unit
";

struct Fixture {
    dir: TempDir,
}

impl Fixture {
    fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        let files = [
            ("list.decl", DECLS),
            ("nat.m", MACHINES),
            ("length.alg", "inl unit => 0\ninr (_ , n) => succ(n)\n"),
            ("red.co", "r = inr (atom:r , e)\ne = inr (atom:e , d)\nd = inr (atom:d , r)\n"),
            ("bad.decl", "mu T(A) = rec +\n"),
        ];
        for (name, text) in files {
            fs::write(dir.path().join(name), text).unwrap();
        }
        Fixture { dir }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn run(&self, args: &[&str]) -> Output {
        Command::new(env!("CARGO_BIN_EXE_contcalc")).current_dir(self.dir.path()).args(args).output().unwrap()
    }
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn enumerate_counts_lists() {
    let f = Fixture::new();
    let o = f.run(&["enumerate", "list.decl", "List", "--x", "A=a,b", "--height", "4", "--count-only"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("15"), "{}", stdout(&o));
    let o = f.run(&["enumerate", "list.decl", "List", "--x", "A=a,b", "--height", "2"]);
    assert_eq!(stdout(&o), "inl unit\ninr (atom:a , inl unit)\ninr (atom:b , inl unit)\ncount: 3\n");
    let o = f.run(&["enumerate", "list.decl", "List", "--x", "A=3", "--height", "3", "--count-only"]);
    assert!(stdout(&o).contains("13"));
    let o = f.run(&["enumerate", "list.decl", "Z", "--count-only"]);
    assert!(stdout(&o).contains('0'));
}

#[test]
fn enumerate_limit_overflow_exits_3() {
    let f = Fixture::new();
    let o = f.run(&["enumerate", "list.decl", "List", "--x", "A=a,b", "--limit", "10"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn fold_computes_length() {
    let f = Fixture::new();
    let o = f.run(&[
        "fold",
        "list.decl",
        "List",
        "--algebra",
        "length.alg",
        "--input",
        "inr (atom:a , inr (atom:b , inr (atom:c , inl unit)))",
    ]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "nat:3"));
    let o = f.run(&["fold", "list.decl", "List", "--algebra", "length.alg", "--input", "inl unit"]);
    assert_eq!(stdout(&o).trim(), "nat:0");
}

#[test]
fn unfold_shows_the_cycle() {
    let f = Fixture::new();
    let o = f.run(&["unfold", "list.decl", "CoList", "--coalgebra", "red.co", "--state", "r", "--paths", "6"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.trim_end().ends_with("payloads: atom:r atom:e atom:d atom:r atom:e atom:d"), "{out}");
}

#[test]
fn bisim_verdicts_and_codes() {
    let f = Fixture::new();
    assert_eq!(code(&f.run(&["bisim", "nat.m", "inf", "inf2", "--exact"])), 0);
    assert_eq!(code(&f.run(&["bisim", "nat.m", "inf", "inf2", "--depth", "100"])), 0);
    let o = f.run(&["bisim", "nat.m", "three", "inf", "--exact"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("length 4"), "{}", stdout(&o));
    assert_eq!(code(&f.run(&["bisim", "nat.m", "nope", "inf", "--exact"])), 2);
    assert_eq!(code(&f.run(&["bisim", "nat.m", "inf", "inf2", "--exact", "--depth", "3"])), 2);
}

#[test]
fn check_iso_passes_on_fixtures() {
    let f = Fixture::new();
    for args in [
        &["check-iso", "list.decl", "List"][..],
        &["check-iso", "list.decl", "Bin", "--height", "3"][..],
        &["check-iso", "list.decl", "CoNat", "--machines", "nat.m"][..],
    ] {
        let o = f.run(args);
        assert_eq!(code(&o), 0, "{args:?}\n{}", stdout(&o));
        assert!(stdout(&o).contains("checks passed"));
    }
}

#[test]
fn malformed_declaration_is_located() {
    let f = Fixture::new();
    let o = f.run(&["elaborate", "bad.decl"]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.decl:1:16"), "{err}");
}

#[test]
fn missing_file_and_bad_usage_exit_2() {
    let f = Fixture::new();
    assert_eq!(code(&f.run(&["elaborate", "absent.decl"])), 2);
    assert_eq!(code(&f.run(&["frobnicate"])), 2);
    assert_eq!(code(&f.run(&["enumerate", "list.decl", "Missing"])), 2);
}

#[test]
fn output_is_deterministic() {
    let f = Fixture::new();
    let args = ["enumerate", "list.decl", "Bin", "--x", "A=a,b", "--height", "3"];
    let first = stdout(&f.run(&args));
    for _ in 0..3 {
        assert_eq!(stdout(&f.run(&args)), first);
    }
    assert!(Path::new(&f.path("list.decl")).exists());
}
