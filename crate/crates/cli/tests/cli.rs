use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use bimodal::machines::corpus;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bimodal"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn file(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn roundtrip_m_a() {
    let dir = tempfile::tempdir().unwrap();
    let m = file(dir.path(), "ma.cm", corpus::M_A);
    let o = run(&["roundtrip", "--machine", s(&m), "--target", "fw_finite_reach", "--qr", "h"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("run of length 3 recovered"), "{}", stdout(&o));
}

#[test]
fn roundtrip_truncated_targets() {
    let dir = tempfile::tempdir().unwrap();
    let mb = file(dir.path(), "mb.cm", corpus::M_B);
    let me = file(dir.path(), "me.cm", corpus::M_E);
    let o = run(&["roundtrip", "--machine", s(&mb), "--target", "bw_nontermination", "--k", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("sgenbw: FAILS"), "{}", stdout(&o));
    let o = run(&["roundtrip", "--machine", s(&me), "--target", "lossy_omega_reach", "--qr", "r", "--k", "3"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).matches("recovered").count(), 3);
    // the literal dgenr fails inside the bw_rec witness
    let o = run(&["roundtrip", "--machine", s(&me), "--target", "bw_recurrence", "--qr", "r", "--k", "5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("dgenr: FAILS"), "{}", stdout(&o));
}

#[test]
fn search_contradiction() {
    let o = run(&["search", "--formula", "P & ~P", "--class", "product", "--hmax", "3", "--vmax", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("no model within bounds"));
}

#[test]
fn search_budget_exit() {
    let o = run(&["search", "--formula", "P & ~P", "--hmax", "3", "--vmax", "4", "--max-candidates", "1"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn compile_unknown_state() {
    let dir = tempfile::tempdir().unwrap();
    let m = file(dir.path(), "ma.cm", corpus::M_A);
    let o = run(&["compile", "--machine", s(&m), "--target", "bw_nontermination", "--q0", "q9"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["compile", "--machine", s(&m), "--target", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["compile"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn witness_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let m = file(dir.path(), "md.cm", corpus::M_D);
    let (w, e) = (dir.path().join("w.txt"), dir.path().join("e.enc"));
    let o = run(&["compile", "--machine", s(&m), "--target", "bw_nontermination", "--out", s(&e)]);
    assert!(o.status.success());
    let o = run(&["build-witness", "--machine", s(&m), "--kind", "bw_inf", "--k", "4", "--out", s(&w)]);
    assert!(o.status.success());
    let o = run(&["verify-witness", "--model", s(&w), "--enc", s(&e), "--backward", "4"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("[boundary]"));
    let o = run(&["decode", "--model", s(&w), "--enc", s(&e), "--machine", s(&m), "--max-len", "4"]);
    assert!(stdout(&o).starts_with("run 0: <a, 0,0> <b, 1,0> <c, 2,0> <d, 1,0>"), "{}", stdout(&o));
    // without the boundary note the truncation failure counts
    let text = fs::read_to_string(&w).unwrap().replace("# boundary:", "# dropped:");
    let w2 = file(dir.path(), "w2.txt", &text);
    let o = run(&["verify-witness", "--model", s(&w2), "--enc", s(&e)]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn check_valid_and_shrink() {
    let dir = tempfile::tempdir().unwrap();
    let found = dir.path().join("m.txt");
    let f = "<1> P & <1> ~P & <0> Q";
    let o = run(&["search", "-f", f, "--hmax", "2", "--vmax", "3", "--out", s(&found)]);
    assert!(stdout(&o).contains("model found"));
    assert_eq!(run(&["check", "--model", s(&found), "-f", f]).status.code(), Some(0));
    assert_eq!(run(&["check", "--model", s(&found), "-f", &format!("~({f})")]).status.code(), Some(1));
    let o = run(&["valid", "--model", s(&found), "-f", "<0><1>P -> <1><0>P"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["valid", "--model", s(&found), "-f", "<0> P"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["shrink", "--model", s(&found), "-f", f]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("vertical size"));
}

#[test]
fn sampling_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let found = dir.path().join("m.txt");
    run(&["search", "-f", "P", "--hmax", "3", "--vmax", "3", "--out", s(&found)]);
    // 9 worlds x 3 variables is beyond a budget of 16 valuations
    let f = "A | B | ~C";
    let a = run(&["valid", "--model", s(&found), "-f", f, "--budget", "16", "--sample", "50", "--seed", "7"]);
    let b = run(&["valid", "--model", s(&found), "-f", f, "--budget", "16", "--sample", "50", "--seed", "7"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), Some(1));
    let c = run(&["valid", "--model", s(&found), "-f", "P | ~P", "--budget", "1", "--sample", "5"]);
    assert_eq!(c.status.code(), Some(3));
}

#[test]
fn oracle_and_simulate() {
    let dir = tempfile::tempdir().unwrap();
    let m = file(dir.path(), "mf.cm", corpus::M_F);
    let o = run(&["oracle", "--machine", s(&m), "--problem", "reachability", "--qr", "h"]);
    assert!(stdout(&o).starts_with("no-within-bound"));
    let o = run(&["oracle", "--machine", s(&m), "--problem", "lossy-reach", "--qr", "h"]);
    assert!(stdout(&o).starts_with("yes-within-bound"));
    let o = run(&["simulate", "--machine", s(&m), "--depth", "3"]);
    assert!(stdout(&o).contains("<q0, 0,0> <q1, 1,0>"));
}

#[test]
fn parse_reports_errors() {
    let o = run(&["parse", "-f", "P &"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["parse", "-f", "[0]+ P"]);
    assert!(o.status.success());
}
