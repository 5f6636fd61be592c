use std::path::Path;
use std::process::{Command, Output};

use vindef::engine::DeductionStep;

const BIN: &str = env!("CARGO_BIN_EXE_vindef");
const DATA: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/data");

fn run(args: &[&str], cwd: &Path) -> Output {
    Command::new(BIN).args(args).current_dir(cwd).output().unwrap()
}

fn out(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn build(dir: &Path, src: &str, name: &str) {
    let o = run(&["build", &format!("{DATA}/{src}"), "--out", name, "--no-timestamp"], dir);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn build_reports_counts() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["build", &format!("{DATA}/table1.json"), "--mode", "exact"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(out(&o).trim(), "37 observables, 26 contexts");
    assert!(dir.path().join("diagram.json").exists());
}

#[test]
fn no_timestamp_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    build(dir.path(), "table1.json", "a.json");
    build(dir.path(), "table1.json", "b.json");
    let (a, b) = (std::fs::read(dir.path().join("a.json")).unwrap(), std::fs::read(dir.path().join("b.json")).unwrap());
    assert_eq!(a, b);
    assert!(!String::from_utf8(a).unwrap().contains("generated_at"));

    build(dir.path(), "table1.json", "c.json");
    let o = run(&["build", &format!("{DATA}/table1.json"), "--out", "t.json"], dir.path());
    assert!(o.status.success());
    assert!(std::fs::read_to_string(dir.path().join("t.json")).unwrap().contains("generated_at"));
}

#[test]
fn propagate_reports_contradiction_and_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    build(dir.path(), "table1.json", "d.json");
    let o = run(&["propagate", "d.json", "--set", "a=1", "--set", "b=1", "--expect", "contradiction", "--out", "t.json"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = out(&o);
    assert!(text.starts_with("CONTRADICTION at observable"), "{text}");
    assert!(text.contains("(P_1)"));
    let trace: Vec<DeductionStep> = serde_json::from_str(&std::fs::read_to_string(dir.path().join("t.json")).unwrap()).unwrap();
    assert_eq!(trace.iter().filter(|s| s.context.is_none()).count(), 2);

    let o = run(&["propagate", "d.json", "--set", "a=1", "--set", "b=1", "--expect", "fixpoint"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn propagate_fixpoint_on_cabello_set() {
    let dir = tempfile::tempdir().unwrap();
    build(dir.path(), "cabello18.json", "k.json");
    let o = run(&["propagate", "k.json", "--set", "P_a=1", "--set", "P_b=0", "--expect", "fixpoint"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(out(&o).starts_with("FIXPOINT"));
    assert!(out(&o).contains("undefined: 10"));
}

#[test]
fn search_counts() {
    let dir = tempfile::tempdir().unwrap();
    build(dir.path(), "cabello18.json", "k.json");
    build(dir.path(), "table1.json", "d.json");
    assert_eq!(out(&run(&["search", "k.json"], dir.path())).trim(), "0 total admissible assignments");
    let text = out(&run(&["search", "d.json"], dir.path()));
    assert!(text.starts_with("8 total admissible assignments"), "{text}");
    let capped = out(&run(&["search", "d.json", "--cap", "3"], dir.path()));
    assert!(capped.starts_with("≥3 (capped)"), "{capped}");
}

#[test]
fn localize_then_check_then_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["localize", "--psi", "1,0,0", "--phi", "0.6,0.8,0", "--out", "run", "--no-timestamp"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out(&o).contains("path: contract+lemma1"));
    let ok = run(&["check", "run/diagram.json", "run/certificate.json"], dir.path());
    assert_eq!(ok.status.code(), Some(0));
    assert!(out(&ok).starts_with("OK"));

    let cert_path = dir.path().join("run/certificate.json");
    let mut cert: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&cert_path).unwrap()).unwrap();
    let trace = cert["branches"][0]["trace"].as_array_mut().unwrap();
    let last = trace.len() - 2;
    let flipped = 1 - trace[last]["conclusion"][1].as_u64().unwrap();
    trace[last]["conclusion"][1] = flipped.into();
    std::fs::write(&cert_path, serde_json::to_string(&cert).unwrap()).unwrap();
    let bad = run(&["check", "run/diagram.json", "run/certificate.json"], dir.path());
    assert_eq!(bad.status.code(), Some(1));
    assert!(out(&bad).starts_with("FAILED"));
}

#[test]
fn localize_degenerate_and_exact_mode() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["localize", "--psi", "1,0,0", "--phi", "0,1,0"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(out(&o).contains("value definite"));
    let o = run(&["localize", "--mode", "exact", "--psi", "1,0,0", "--phi", "0.6,0.8,0"], dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn export_dot_with_trace() {
    let dir = tempfile::tempdir().unwrap();
    build(dir.path(), "table1.json", "d.json");
    run(&["propagate", "d.json", "--set", "a=1", "--set", "b=1", "--out", "t.json"], dir.path());
    let o = run(&["export", "d.json", "--format", "dot", "--assignment", "t.json", "--no-timestamp"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let text = out(&o);
    assert!(text.starts_with("graph greechie {"));
    assert_eq!(text.matches("shape=box").count(), 8);
    assert_eq!(text.matches("shape=point").count(), 26);
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("empty.json"), "").unwrap();
    build(dir.path(), "table1.json", "d.json");
    let cases: [&[&str]; 5] = [
        &["build", "empty.json"],
        &["build", "missing.json"],
        &["propagate", "d.json", "--set", "P_99=1"],
        &["propagate", "d.json", "--set", "a=2"],
        &["export", "d.json", "--format", "svg"],
    ];
    for args in cases {
        let o = run(args, dir.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", out(&o));
        assert!(!o.stderr.is_empty(), "{args:?}");
    }
}
