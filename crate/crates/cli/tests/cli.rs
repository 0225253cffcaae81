use std::path::Path;
use std::process::{Command, Output};

fn fairalloc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fairalloc")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn lemma_files(dir: &Path, lemma: &str) -> (String, String) {
    let o = fairalloc(&["reproduce", lemma, "--out-dir", p(dir)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let inst = dir.join(format!("lemma{lemma}.json"));
    let alloc = dir.join(format!("lemma{lemma}.alloc.json"));
    (p(&inst).to_string(), p(&alloc).to_string())
}

#[test]
fn gen_is_deterministic() {
    let args = ["gen", "--seed", "5", "--n", "3", "--m", "7", "--spec", "truncation", "--vals", "two_valued:3/2"];
    let a = fairalloc(&args);
    let b = fairalloc(&args);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let other = fairalloc(&["gen", "--seed", "6", "--n", "3", "--m", "7", "--spec", "truncation", "--vals", "two_valued:3/2"]);
    assert_ne!(a.stdout, other.stdout);
}

#[test]
fn solve_reports_nsw() {
    let dir = tempfile::tempdir().unwrap();
    let (inst, _) = lemma_files(dir.path(), "5");
    let out = dir.path().join("out.json");
    let o = fairalloc(&["solve", &inst, "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("NSW 12 utilities"), "{}", stdout(&o));
    let o = fairalloc(&["audit", &inst, p(&out), "--format", "json"]);
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["alpha_ef1"], "2/5");
    assert_eq!(report["nsw"], "12");
    assert_eq!(report["is_po"], true);

    let seq = fairalloc(&["--sequential", "solve", &inst]);
    let par = fairalloc(&["solve", &inst]);
    assert_eq!(seq.stdout, par.stdout);

    let o = fairalloc(&["solve", &inst, "--objective", "local"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = fairalloc(&["solve", &inst, "--objective", "leximin"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn round_robin_with_adversarial_tie_break() {
    let dir = tempfile::tempdir().unwrap();
    let (inst, expected) = lemma_files(dir.path(), "8");
    let out = dir.path().join("rr.json");
    let o = fairalloc(&["solve", &inst, "--objective", "rr", "--tie-break", "lemma8", "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(std::fs::read(&out).unwrap(), std::fs::read(&expected).unwrap());
    let by_index = fairalloc(&["solve", &inst, "--objective", "rr"]);
    assert_ne!(by_index.stdout, std::fs::read(&expected).unwrap());
    let bad = fairalloc(&["solve", &inst, "--objective", "rr", "--tie-break", "g1 g2;by-index"]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn empty_instance_solves_to_empty_allocation() {
    let dir = tempfile::tempdir().unwrap();
    let inst = dir.path().join("empty.json");
    let o = fairalloc(&["gen", "--seed", "1", "--n", "2", "--m", "0", "--spec", "uniform", "--out", p(&inst)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = fairalloc(&["solve", p(&inst)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let alloc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(alloc["bundles"], serde_json::json!([[], []]));
}

#[test]
fn audit_formats() {
    let dir = tempfile::tempdir().unwrap();
    let (inst, alloc) = lemma_files(dir.path(), "6");
    let table = stdout(&fairalloc(&["audit", &inst, &alloc]));
    assert!(table.contains("alpha       2/3"), "{table}");
    assert!(table.contains("po          true"), "{table}");
    let csv = stdout(&fairalloc(&["audit", &inst, &alloc, "--format", "csv"]));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("alpha,alpha_decimal,is_ef,is_ef1,is_po,worst_pair,nsw,complete"));
    assert!(lines.next().unwrap().starts_with("2/3,"), "{csv}");

    let empty = dir.path().join("empty.alloc.json");
    std::fs::write(&empty, r#"{"bundles": [[], []], "unallocated": ["g1","g2","g3","g4","g5","g6"]}"#).unwrap();
    let o = fairalloc(&["audit", &inst, p(&empty), "--format", "json"]);
    let report: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(report["is_ef"], true);
    assert_eq!(report["is_po"], false);
    assert!(report["po_dominator"].is_object());
}

#[test]
fn classify_output() {
    let dir = tempfile::tempdir().unwrap();
    let (inst, _) = lemma_files(dir.path(), "5");
    let o = fairalloc(&["classify", &inst]);
    let text = stdout(&o);
    assert!(text.contains("hereditary: true"), "{text}");
    assert!(text.contains("matroid: false"), "{text}");
    assert!(text.contains("strongly p-extendible: 4"), "{text}");
    assert!(text.contains("witness: "), "{text}");

    let m = dir.path().join("m.json");
    fairalloc(&["gen", "--seed", "2", "--n", "2", "--m", "5", "--spec", "partition", "--out", p(&m)]);
    let text = stdout(&fairalloc(&["classify", p(&m)]));
    assert!(text.contains("matroid: true") && text.contains("p-extendible: 1"), "{text}");
}

#[test]
fn report_formats() {
    let o = fairalloc(&["report", "theorem1", "--count", "5", "--seed", "3", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("seed,n,m,spec_kind,valuation_class,alpha_num,alpha_den,po,bound_num,bound_den,pass\n"));
    assert_eq!(text.lines().count(), 6);
    assert!(stderr(&o).contains("theorem1: 5 instances, violations: 0"), "{}", stderr(&o));
    let md = stdout(&fairalloc(&["report", "lemmas"]));
    assert!(md.starts_with("| seed |"), "{md}");
}

#[test]
fn exit_codes() {
    assert_eq!(fairalloc(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(fairalloc(&["reproduce", "9"]).status.code(), Some(1));
    assert_eq!(fairalloc(&["solve", "/nonexistent/file.json"]).status.code(), Some(1));
    assert_eq!(fairalloc(&["--help"]).status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let o = fairalloc(&["solve", p(&bad)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("bad.json"), "{}", stderr(&o));

    let (inst, _) = lemma_files(dir.path(), "5");
    let o = fairalloc(&["--budget", "100", "solve", &inst]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("--objective local"));

    let o = fairalloc(&["reproduce", "4", "--k", "0"]);
    assert_eq!(o.status.code(), Some(1));
}
