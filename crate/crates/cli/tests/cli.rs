//! End-to-end runs of the `chevkit` binary: output shapes and exit codes.

use std::process::{Command, Output};

use serde_json::Value;

fn chevkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_chevkit")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON output")
}

#[test]
fn roots_lists_the_system() {
    let out = chevkit(&["roots", "A3"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["family"], "A");
    assert_eq!(v["rank"], 3);
    assert_eq!(v["roots"].as_array().unwrap().len(), 12);
    assert_eq!(v["basis_order"][0], "x[e1-e2]");
}

#[test]
fn gen_emits_a_matrix_file() {
    let out = chevkit(&["gen", "--ring", "Z/4", "--system", "A3", "--elem", "x", "--root", "0", "--t", "3"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["ring"], "Z/4");
    assert_eq!(v["n"], 15);
    let out = chevkit(&["gen", "--ring", "dual(Z/2)", "--system", "A5", "--elem", "wij", "--i", "1", "--j", "3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn verify_passes_and_rejects_non_local_rings() {
    let out = chevkit(&["verify", "A3", "Z/4", "steinberg", "--seed", "7", "--samples", "20", "--json"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["stages"].as_array().unwrap().len(), 4);
    let out = chevkit(&["verify", "D4", "dual(residue(Z/2))", "qorder"]);
    assert!(out.status.success());
    let out = chevkit(&["verify", "A3", "Z/6"]);
    assert_eq!(out.status.code(), Some(2));
    let out = chevkit(&["verify", "B3", "Z/4"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rigidity_and_centralizer_reports() {
    let out = chevkit(&["rigidity", "--fixture", "fourth", "--json"]);
    assert!(out.status.success());
    assert_eq!(json(&out)["solution_dim"], 0);
    let out = chevkit(&["centralizer6", "--ring", "Z/4", "--json"]);
    assert_eq!(json(&out)["family_size"], 4096);
}

#[test]
fn split3_reads_a_matrix_file() {
    let dir = std::env::temp_dir().join(format!("chevkit-split3-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("a.json");
    std::fs::write(&path, r#"{"ring": "Z/4", "n": 3, "entries": [[0, 3, 0], [1, 3, 0], [0, 0, 1]]}"#).unwrap();
    let out = chevkit(&["split3", "--matrix", path.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!((v["rank0"].as_u64(), v["rank1"].as_u64()), (Some(1), Some(2)));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn pipeline_single_stage_is_reproducible() {
    let args = ["pipeline", "--only", "ring-axioms,matrix-unit", "--json", "--seed", "3", "--samples", "30"];
    let a = chevkit(&args);
    let b = chevkit(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    let names: Vec<&str> = v["stages"].as_array().unwrap().iter().map(|s| s["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["ring-axioms", "matrix-unit"]);
    assert_eq!(chevkit(&["pipeline", "--only", "nonsense"]).status.code(), Some(2));
}

#[test]
fn fixture_lookup_sets_exit_status() {
    assert!(chevkit(&["fixtures", "a3-w13"]).status.success());
    assert_eq!(chevkit(&["fixtures", "no-such-fixture"]).status.code(), Some(2));
}
