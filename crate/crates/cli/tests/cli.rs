use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const SEVEN_POINTS: &str = "\
rel coll 2
hyp coll a b c
hyp coll c d e
hyp coll e f g
hyp coll a d g
hyp coll b c d
query coll a b d
";

fn kequiv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kequiv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn seven_point_golden() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "seven.kq", SEVEN_POINTS);
    let o = kequiv(&["solve", &f]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "entailed (project (trans (assume 0) (assume 4)) a b d)\n");
    let naive = kequiv(&["solve", "--engine", "naive", &f]);
    assert_eq!(stdout(&naive), "entailed\n");
}

#[test]
fn repeated_terms_are_subreflexive() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "p.kq", "rel coll 2\nquery coll a a b\n");
    assert_eq!(stdout(&kequiv(&["solve", &f])), "entailed (subrefl a b)\n");
}

#[test]
fn empty_file_has_no_answers() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "empty.kq", "");
    let o = kequiv(&["solve", &f]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "");
}

#[test]
fn parse_errors_exit_1_with_location() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "bad.kq", "rel coll 2\nhyp coll a b\n");
    let o = kequiv(&["solve", &f]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("line 2, column 13"), "{err}");
    assert!(err.contains("takes 3 terms, got 2"), "{err}");

    let f = write(&dir, "dup.kq", "rel coll 2\nrel coll 2\n");
    assert_eq!(kequiv(&["solve", &f]).status.code(), Some(1));
    let f = write(&dir, "unknown.kq", "query cycl a b c d\n");
    assert_eq!(kequiv(&["solve", &f]).status.code(), Some(1));
    assert_eq!(kequiv(&["solve", path(&dir.path().join("missing.kq"))]).status.code(), Some(1));
}

#[test]
fn guard_violations_exit_2() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "eq.kq", "rel coll 2\nclass a x\nhyp coll a b c\neq a x\nquery coll x b c\n");
    assert!(kequiv(&["solve", &f]).status.success());
    assert_eq!(kequiv(&["solve", "--engine", "naive", &f]).status.code(), Some(2));
    let f = write(&dir, "clash.kq", "eq a b\n");
    assert_eq!(kequiv(&["solve", &f]).status.code(), Some(2));
}

#[test]
fn solve_then_check_round_trips() {
    let dir = TempDir::new().unwrap();
    let gen = kequiv(&["gen", "--k", "2", "--terms", "30", "--lines", "3", "--seed", "4", "--queries", "20"]);
    let f = write(&dir, "gen.kq", &stdout(&gen));
    let answers = stdout(&kequiv(&["solve", &f]));
    assert!(answers.contains("entailed ("));
    assert!(answers.contains("not-entailed"));
    let proofs = write(&dir, "answers.txt", &answers);
    let o = kequiv(&["check", &f, &proofs]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).lines().all(|l| l == "pass" || l == "skip"));

    let golden = write(&dir, "seven.kq", SEVEN_POINTS);
    let ok = write(&dir, "ok.txt", "entailed (project (trans (assume 0) (assume 4)) a b d)\n");
    assert_eq!(stdout(&kequiv(&["check", &golden, &ok])), "pass\n");
}

#[test]
fn corrupted_proofs_exit_3() {
    let dir = TempDir::new().unwrap();
    let golden = write(&dir, "seven.kq", SEVEN_POINTS);
    let bad = write(&dir, "bad.txt", "entailed (project (trans (assume 0) (assume 2)) a b d)\n");
    let o = kequiv(&["check", &golden, &bad]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).starts_with("fail: answer line 1 (query on line 7)"));

    let short = write(&dir, "short.txt", "");
    assert_eq!(kequiv(&["check", &golden, &short]).status.code(), Some(3));
}

#[test]
fn gen_is_seed_stable() {
    let args = |seed: &'static str| {
        ["gen", "--k", "3", "--terms", "20", "--lines", "2", "--seed", seed, "--partition-rate", "0.3"]
    };
    let a = kequiv(&args("17"));
    assert!(a.status.success());
    assert_eq!(a.stdout, kequiv(&args("17")).stdout);
    assert_ne!(a.stdout, kequiv(&args("18")).stdout);
    assert!(stdout(&a).contains("\nclass "));
}

#[test]
fn gen_without_partitions_declares_no_classes() {
    let o = kequiv(&["gen", "--k", "2", "--terms", "15", "--lines", "2", "--seed", "1", "--partition-rate", "0"]);
    assert!(!stdout(&o).contains("class"));
    let o = kequiv(&["gen", "--k", "2", "--terms", "4", "--lines", "2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bench_counters_are_deterministic() {
    let run = || {
        let o = kequiv(&["bench", "--workload", "random", "--engine", "both", "--k", "1,2,3", "--n", "5,8", "--seed", "3"]);
        assert!(o.status.success());
        stdout(&o)
            .lines()
            .map(|l| {
                let mut cols: Vec<&str> = l.split(',').collect();
                cols.remove(5);
                cols.join(",")
            })
            .collect::<Vec<_>>()
    };
    let first = run();
    assert_eq!(first[0], "engine,k,n_hyps,n_terms,seed,merges,max_kset,find_merges_calls");
    assert_eq!(first.len(), 1 + 3 * 2 * 2);
    assert_eq!(first, run());
}

#[test]
fn bench_line_workload_and_csv_file() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("out.csv");
    let o = kequiv(&["bench", "--k", "2", "--n", "1000", "--csv", path(&csv)]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[..5], &["kset", "2", "1000", "1002", "0"]);
    assert_eq!(row[6], "999");
    let o = kequiv(&["bench", "--engine", "naive", "--k", "2", "--n", "1000"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn usage_exit_codes() {
    assert_eq!(kequiv(&["--help"]).status.code(), Some(0));
    assert_eq!(kequiv(&["--version"]).status.code(), Some(0));
    assert_eq!(kequiv(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(kequiv(&["solve"]).status.code(), Some(1));
    assert_eq!(kequiv(&["gen", "--k", "x"]).status.code(), Some(1));
}
