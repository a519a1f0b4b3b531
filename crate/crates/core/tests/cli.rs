use std::path::Path;
use std::process::{Command, Output};

use semiring_forge::characterize::{induced_semirings, TheoremForm};
use semiring_forge::io::{read_semiring, write_semiring, SemiringJson};
use semiring_forge::order::Semilattice;
use semiring_forge::semiring::{cyclic_group, v_of_group, Semiring};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semiring-forge"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.sr", "2\n0 1\n1 1\n0 0\n0 1\n");
    let o = run(&["check", &f]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 1"));
    assert_eq!(run(&["check", "/nonexistent.sr"]).status.code(), Some(2));
}

#[test]
fn non_simple_product_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let b = Semiring::boolean();
    let f = write(dir.path(), "b2b2.sr", &write_semiring(&b.product(&b)));
    let o = run(&["check", &f, "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["axioms_ok"], true);
    assert_eq!(v["structure"]["simple"], false);
    assert!(v["verdict"].is_null());
}

#[test]
fn largest_chain_four_example_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let list = induced_semirings(&Semilattice::chain(4), TheoremForm::Res1).unwrap();
    let r10 = list.iter().find(|m| m.size() == 10).unwrap();
    let f = write(dir.path(), "r10.sr", &write_semiring(&r10.semiring));
    let o = run(&["check", &f, "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["case"], "right-not-left");
    assert_eq!(v["verdict"]["verdict"], "success");
}

#[test]
fn invalid_axioms_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    // Non-associative multiplication.
    let f = write(dir.path(), "bad.sr", "2\n0 1\n1 1\n#\n1 0\n0 0\n");
    let o = run(&["check", &f]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("axioms: violated"));
}

#[test]
fn examples_match() {
    let o = run(&["examples"]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["examples", "--print"]);
    assert!(stdout(&o).contains("== right-not-left, chain 4 =="));
}

#[test]
fn enumeration_is_deterministic_across_schedules() {
    let a = run(&["enumerate", "--max-size", "5", "--jobs", "1"]);
    let b = run(&["enumerate", "--max-size", "5", "--jobs", "4"]);
    let c = run(&["enumerate", "--max-size", "5", "--sequential"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    assert!(stdout(&a).ends_with("total 15\n"));
}

#[test]
fn enumeration_writes_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = run(&["enumerate", "--max-size", "4", "--case", "right-not-left", "--out", d]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("001-size3.sr")).unwrap();
    assert_eq!(read_semiring(&text).unwrap().size(), 3);
    assert!(dir.path().join("corpus.json").exists());
}

#[test]
fn stretch_is_required_above_desk_scale() {
    assert_eq!(run(&["enumerate", "--max-size", "6"]).status.code(), Some(2));
}

#[test]
fn embed_rejects_two_element_ring() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "b.sr", &write_semiring(&Semiring::boolean()));
    assert_eq!(run(&["embed", &f]).status.code(), Some(1));
}

#[test]
fn embed_reports_conditions() {
    let dir = tempfile::tempdir().unwrap();
    let list = induced_semirings(&Semilattice::chain(3), TheoremForm::Jm1).unwrap();
    let f = write(dir.path(), "r5.sr", &write_semiring(&list[0].semiring));
    let o = run(&["embed", &f]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["injective"], true);
}

#[test]
fn monico_smallest_instance() {
    let o = run(&["construct", "monico", "--m", "1", "--n", "1", "--p", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(read_semiring(&stdout(&o)).unwrap().size(), 2);
}

#[test]
fn box_construction_is_v_of_z2() {
    let o = run(&["construct", "box", "--chain", "2", "--n", "2", "--perm", "1 0"]);
    assert_eq!(o.status.code(), Some(0));
    let r = read_semiring(&stdout(&o)).unwrap();
    assert!(r.is_isomorphic(&v_of_group(2, &cyclic_group(2)).unwrap()));
}

#[test]
fn box_rejects_non_free_group() {
    let o = run(&["construct", "box", "--chain", "2", "--n", "3", "--perm", "1 0 2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn res1_needs_transitive_generators() {
    assert_eq!(run(&["construct", "res1", "--chain", "3"]).status.code(), Some(1));
    let o = run(&["construct", "res1", "--chain", "3", "--gen", "0 1 2", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let j: SemiringJson = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(j.size, 3);
    assert_eq!(j.realization.unwrap().morphisms.len(), 3);
}

#[test]
fn conjectures_persist_report() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = run(&["conjectures", "--max-size", "4", "--out", d, "--strict"]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("conjecture_counterexamples.json")).unwrap();
    assert!(serde_json::from_str::<serde_json::Value>(&text).is_ok());
}

#[test]
fn congruences_of_product() {
    let dir = tempfile::tempdir().unwrap();
    let b = Semiring::boolean();
    let f = write(dir.path(), "b2b2.sr", &write_semiring(&b.product(&b)));
    let o = run(&["congruences", &f]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().count() > 2);
}
