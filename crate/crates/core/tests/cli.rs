use std::path::Path;
use std::process::{Command, Output};

use superposition::{io, random};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_superposition"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn value(out: &Output) -> f64 {
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).expect("json on stdout");
    v["value"].as_f64().expect("numeric value")
}

#[test]
fn plus_state_has_ln2_relative_entropy() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "plus.json", r#"{"dim":2,"entries":[[0.5,0],[0.5,0],[0.5,0],[0.5,0]]}"#);
    let out = run(&["measure", &f, "--dims", "1,1", "--measure", "as"]);
    assert!(out.status.success());
    assert!((value(&out) - 2f64.ln()).abs() < 1e-12);
}

#[test]
fn qubit_kyfan_is_half_coherence() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "q.json", r#"{"dim":2,"entries":[[0.5,0],[0.3,0],[0.3,0],[0.5,0]]}"#);
    let out = run(&["measure", &f, "--dims", "1,1", "--measure", "kyfan:1"]);
    assert!(out.status.success());
    assert!((value(&out) - 0.3).abs() < 1e-12);
    let af = run(&["measure", &f, "--dims", "1,1", "--measure", "af", "--starts", "4"]);
    assert!(af.status.success());
    // binary entropy of (1 + 0.8)/2 for concurrence 0.6
    let h = -(0.9f64 * 0.9f64.ln() + 0.1 * 0.1f64.ln());
    assert!((value(&af) - h).abs() < 1e-6);
}

#[test]
fn written_states_parse_back() {
    let dir = tempfile::tempdir().unwrap();
    let rho = random::random_state(&mut random::rng(4, 0), 5);
    let f = write(dir.path(), "r.json", &io::matrix_to_json(rho.matrix()));
    let out = run(&["measure", &f, "--dims", "2,3", "--measure", "trace"]);
    assert!(out.status.success());
    let l = superposition::Decomposition::bipartite(2, 3).unwrap();
    let direct = superposition::measures::trace_measure(&rho, &l).unwrap();
    assert_eq!(value(&out), direct);
}

#[test]
fn invalid_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"dim":2"#);
    assert_eq!(run(&["measure", &bad, "--dims", "1,1", "--measure", "as"]).status.code(), Some(2));
    let not_psd = write(dir.path(), "n.json", r#"{"dim":2,"entries":[[1.5,0],[0,0],[0,0],[-0.5,0]]}"#);
    assert_eq!(run(&["measure", &not_psd, "--dims", "1,1", "--measure", "as"]).status.code(), Some(2));
    let plus = write(dir.path(), "p.json", r#"{"dim":2,"entries":[[0.5,0],[0.5,0],[0.5,0],[0.5,0]]}"#);
    assert_eq!(run(&["measure", &plus, "--dims", "1,2", "--measure", "as"]).status.code(), Some(2));
    assert_eq!(run(&["measure", &plus, "--dims", "1,1", "--measure", "kyfan:2"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn simulate_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut csvs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let p = dir.path().join(name);
        let out = run(&[
            "simulate", "--scenario", "f3", "--levels", "3", "--seed", "7", "--t-max", "10", "--steps", "20",
            "--out", p.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(p.with_extension("json").exists());
        csvs.push(std::fs::read(&p).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
    let text = String::from_utf8(csvs[0].clone()).unwrap();
    let header = text.lines().next().unwrap();
    assert_eq!(header.split(',').filter(|c| c.starts_with("A_") && c[2..].parse::<usize>().is_ok()).count(), 3);
    assert_eq!(text.lines().count(), 22);
}

#[test]
fn simulate_matches_closed_form() {
    let out = run(&["simulate", "--scenario", "f1", "--levels", "3", "--t-max", "5", "--steps", "20", "--analytic"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stderr).unwrap();
    let line = text.lines().find(|l| l.contains("analytic")).expect("deviation line on stderr");
    let dev: f64 = line.rsplit('=').next().unwrap().trim().parse().unwrap();
    assert!(dev <= 1e-7, "{line}");
}

#[test]
fn interfere_and_channel_check() {
    let dir = tempfile::tempdir().unwrap();
    let plus = write(dir.path(), "p.json", r#"{"dim":2,"entries":[[0.5,0],[0.5,0],[0.5,0],[0.5,0]]}"#);
    let out = run(&["interfere", &plus, "--k", "1"]);
    assert!(out.status.success());
    assert!((value(&out) - 0.5).abs() < 1e-12);

    let ident = write(dir.path(), "id.json", r#"{"dim":2,"kraus":[[[1,0],[0,0],[0,0],[1,0]]]}"#);
    let out = run(&["channel-check", &ident, "--dims", "1,1", "--samples", "10"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["is_sp"], true);

    // swapping the two paths keeps block-diagonal states block diagonal but
    // exchanges the block weights
    let swap = write(dir.path(), "x.json", r#"{"dim":2,"kraus":[[[0,0],[1,0],[1,0],[0,0]]]}"#);
    let out = run(&["channel-check", &swap, "--dims", "1,1", "--samples", "10"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["is_sp"], false);
    assert_eq!(v["is_block_preserving"], true);
}

#[test]
fn verify_passes_small_suites() {
    let out = run(&["verify", "--suite", "interferometer", "--samples", "5", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().last().unwrap().ends_with("0 failed"));
}
