use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const PARITY: &str = "\
[machine]
kind = pfa
format = 1
alphabet = a b
states = even odd
start = even
accept = even

[transitions.a]
even -> odd : 1
odd -> even : 1

[transitions.b]
even -> even : 1
odd -> odd : 1
";

fn qautlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qautlab")).args(args).env_remove("QAUTLAB_TOL").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn zoo_file(dir: &TempDir, name: &str, params: &[&str]) -> PathBuf {
    let p = path(dir, &format!("{name}.qaut"));
    let mut args = vec!["zoo", name, s(&p)];
    args.extend_from_slice(params);
    let o = qautlab(&args);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    p
}

#[test]
fn check_exit_codes() {
    let dir = TempDir::new().unwrap();
    let lnh = zoo_file(&dir, "lnh_kwqfa1", &[]);
    let o = qautlab(&["check", s(&lnh)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("ok: kwqfa machine with 63 states"));

    let bad = path(&dir, "bad.qaut");
    std::fs::write(&bad, PARITY.replace("even -> odd : 1", "even -> odd : 0.5")).unwrap();
    let o = qautlab(&["check", s(&bad)]);
    assert_eq!(code(&o), 1);
    assert!(!stdout(&o).is_empty());

    let broken = path(&dir, "broken.qaut");
    std::fs::write(&broken, "[machine]\nkind = pfa\nstates = \n").unwrap();
    assert_eq!(code(&qautlab(&["check", s(&broken)])), 2);
    assert_eq!(code(&qautlab(&["check", s(&path(&dir, "missing.qaut"))])), 2);
}

#[test]
fn run_reports_cutpoint_verdicts() {
    let dir = TempDir::new().unwrap();
    let lnh = zoo_file(&dir, "lnh_kwqfa1", &[]);
    let o = qautlab(&["run", s(&lnh), "abab", "--cutpoint", "0.5", "--mode", "strict"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("verdict   ACCEPT (strict"));

    let o = qautlab(&["run", s(&lnh), "", "--cutpoint", "0.5"]);
    let out = stdout(&o);
    let p: f64 = out.lines().next().unwrap().split_whitespace().nth(1).unwrap().parse().unwrap();
    assert!((p - 0.5).abs() < 1e-9);
    assert!(out.contains("verdict   REJECT (strict"));
    assert!(out.contains("verdict   REJECT (exclusive"));
    assert!(out.contains("verdict   ACCEPT (nonstrict"));

    assert_eq!(code(&qautlab(&["run", s(&lnh), "abc"])), 2);
    assert_eq!(code(&qautlab(&["run", s(&lnh), "ab", "--mode", "sideways", "--cutpoint", "0.5"])), 2);
}

#[test]
fn run_monte_carlo_is_seeded() {
    let dir = TempDir::new().unwrap();
    let leq = zoo_file(&dir, "leq_pfa_restart", &["--eps", "0.25"]);
    let a = qautlab(&["run", s(&leq), "ab", "--mc", "2000", "--seed", "7"]);
    let b = qautlab(&["run", s(&leq), "ab", "--mc", "2000", "--seed", "7"]);
    assert_eq!(code(&a), 0);
    assert!(stdout(&a).contains("mc        "));
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("runtime   "));
}

#[test]
fn sweep_table() {
    let dir = TempDir::new().unwrap();
    let upal = zoo_file(&dir, "upal_restart", &["--eps", "0.2"]);
    let o = qautlab(&["sweep", s(&upal), "--max-len", "6", "--oracle", "L_upal", "--cutpoint", "0.5"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("word,len,p_accept,p_reject,residual,oracle_member,verdict"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 127);
    assert_eq!(rows[0][0], "");
    assert_eq!(rows[1][0], "a");
    for r in &rows {
        let member = r[5] == "true";
        assert_eq!(r[6] == "ACCEPT", member, "{r:?}");
    }
    let csv = path(&dir, "sweep.csv");
    let again = qautlab(&["sweep", s(&upal), "--max-len", "6", "--oracle", "L_upal", "--cutpoint", "0.5", "--csv", s(&csv)]);
    assert_eq!(code(&again), 0);
    assert_eq!(std::fs::read(&csv).unwrap(), o.stdout);

    assert_eq!(code(&qautlab(&["sweep", s(&upal), "--max-len", "2", "--alphabet", ""])), 2);
    assert_eq!(code(&qautlab(&["sweep", s(&upal), "--max-len", "15"])), 2);
    assert_eq!(code(&qautlab(&["sweep", s(&upal), "--max-len", "2", "--csv", "/nonexistent/dir/x.csv"])), 2);
    assert_eq!(code(&qautlab(&["sweep", s(&upal), "--max-len", "2", "--oracle", "L_twin"])), 2);
}

#[test]
fn sweep_alphabet_override() {
    let dir = TempDir::new().unwrap();
    let upal = zoo_file(&dir, "upal_restart", &["--eps", "0.2"]);
    let o = qautlab(&["sweep", s(&upal), "--max-len", "3", "--alphabet", "b"]);
    let words: Vec<String> = stdout(&o).lines().skip(1).map(|l| l.split(',').next().unwrap().to_string()).collect();
    assert_eq!(words, ["", "b", "bb", "bbb"]);
}

#[test]
fn zoo_then_verify() {
    let dir = TempDir::new().unwrap();
    let am = zoo_file(&dir, "am_restart", &["--m", "3", "--eps", "0.2"]);
    assert_eq!(code(&qautlab(&["check", s(&am)])), 0);
    let o = qautlab(&["verify", s(&am), "--oracle", "A_m(3)", "--max-len", "8", "--bound", "0.2"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));

    let o = qautlab(&["verify", s(&am), "--oracle", "A_m(3)", "--max-len", "6", "--bound", "1e-4"]);
    assert_eq!(code(&o), 1);
    let lens: Vec<usize> = stdout(&o)
        .lines()
        .filter_map(|l| l.strip_prefix("counterexample "))
        .map(|l| l.split('"').nth(1).unwrap().len())
        .collect();
    assert!(!lens.is_empty());
    assert!(lens.windows(2).all(|p| p[0] <= p[1]), "{lens:?}");

    assert_eq!(code(&qautlab(&["verify", s(&am), "--oracle", "L_nope", "--max-len", "3", "--bound", "0.2"])), 2);
    assert_eq!(code(&qautlab(&["zoo", "nope", s(&path(&dir, "x.qaut"))])), 2);
    assert!(stdout(&qautlab(&["zoo", "--list"])).lines().any(|l| l == "am_restart"));
}

#[test]
fn convert_parity_then_verify_against_source() {
    let dir = TempDir::new().unwrap();
    let parity = path(&dir, "parity.qaut");
    std::fs::write(&parity, PARITY).unwrap();
    let kw = path(&dir, "kw.qaut");
    let o = qautlab(&["convert", "--rule", "pfa-to-kwqfa", s(&parity), s(&kw)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(code(&qautlab(&["check", s(&kw)])), 0);
    // the embedded gap shrinks like 9^{-|w|}, so verdicts need a tolerance below it
    let o = Command::new(env!("CARGO_BIN_EXE_qautlab"))
        .args(["verify", s(&kw), "--against", s(&parity), "--cutpoint", "0.5", "--max-len", "8"])
        .env("QAUTLAB_TOL", "1e-300")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stdout(&o));

    assert_eq!(code(&qautlab(&["convert", "--rule", "nope", s(&parity), s(&kw)])), 2);
    assert_eq!(code(&qautlab(&["convert", "--rule", "qfa-to-gfa", s(&parity), s(&kw)])), 2);
}

#[test]
fn convert_chain_through_restart_and_post() {
    let dir = TempDir::new().unwrap();
    let leq = zoo_file(&dir, "leq_pfa_restart", &["--eps", "0.25"]);
    let post = path(&dir, "post.qaut");
    assert_eq!(code(&qautlab(&["convert", "--rule", "restart-to-post", s(&leq), s(&post)])), 0);
    let amp = path(&dir, "amp.qaut");
    let o = qautlab(&["amplify", s(&post), "--eps", "0.25", "--target-eps", "0.0625", s(&amp)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = qautlab(&["verify", s(&amp), "--oracle", "L_eq", "--max-len", "4", "--bound", "0.0625"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));

    let grid = path(&dir, "grid.qaut");
    let o = qautlab(&["amplify", s(&leq), "--eps", "0.25", "--target-eps", "0.1", s(&grid)]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = qautlab(&["verify", s(&grid), "--oracle", "L_eq", "--max-len", "6", "--bound", "0.1"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn help_and_usage_errors() {
    assert_eq!(code(&qautlab(&["--help"])), 0);
    assert_eq!(code(&qautlab(&[])), 2);
    assert_eq!(code(&qautlab(&["frobnicate"])), 2);
}
