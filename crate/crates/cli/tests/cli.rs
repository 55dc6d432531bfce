//! Golden runs of the binary: exit codes and the shape of the output.

use std::process::{Command, Output};

use coopbasis::format::{
    congruences_from_docs, GExpansionDoc, IntegralityDoc, MargolisDoc, PhiExpansionDoc, PolyTable,
    VerifyDoc, WeightDoc,
};
use coopbasis_core::Valuation;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coopbasis"))
        .args(args)
        .env_remove("COOPBASIS_BUDGET")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json<T: serde::de::DeserializeOwned>(out: &Output) -> T {
    serde_json::from_slice(&out.stdout).expect("valid JSON document")
}

#[test]
fn phi_table() {
    let out = run(&["phi", "--prime", "2", "--n", "3"]);
    assert_eq!(code(&out), 0);
    let table: PolyTable = json(&out);
    let af: Vec<i64> = table.rows.iter().map(|r| r.af).collect();
    assert_eq!(af, [-1, -3, -7]);
    assert_eq!(table.rows[1].display, "(2w^3 - w^2 + 2w - 3)/8");

    let out = run(&["phi", "--prime", "2", "--n", "1"]);
    let table: PolyTable = json(&out);
    assert_eq!(table.rows.len(), 1);
    assert_eq!(table.rows[0].display, "(w - 1)/2");
}

#[test]
fn phi_beyond_degree_budget() {
    let out = run(&["phi", "--prime", "7", "--n", "9"]);
    assert_eq!(code(&out), 2);
    assert!(out.stdout.is_empty());
}

#[test]
fn g_table() {
    let out = run(&["g", "--n", "2"]);
    assert_eq!(code(&out), 0);
    let table: PolyTable = json(&out);
    assert_eq!(table.rows[2].display, "(w^2 - 4w + 3)/8");
}

#[test]
fn expand_in_g() {
    let out = run(&["expand", "--basis", "g", "w^2"]);
    assert_eq!(code(&out), 0);
    let doc: GExpansionDoc = json(&out);
    let coords: Vec<(usize, String)> = doc.coefficients.iter().map(|(j, c)| (*j, c.0.to_string())).collect();
    assert_eq!(coords, [(0, "1".to_string()), (1, "8".into()), (2, "8".into())]);

    let doc: GExpansionDoc = json(&run(&["expand", "--basis", "g", "0"]));
    assert!(doc.coefficients.is_empty());
}

#[test]
fn expand_in_phi() {
    let out = run(&["expand", "--basis", "phi", "--precision", "4", "((w-1)/2)^2"]);
    assert_eq!(code(&out), 0);
    let doc: PhiExpansionDoc = json(&out);
    assert_eq!(doc.trace[0].weight, -2);
    assert_eq!(doc.trace[0].indices, [2]);
    assert_eq!(doc.trace[1].weight, -1);
    assert!(doc.residual_weight.0 >= Valuation::Finite(4));
}

#[test]
fn expand_rejects_non_semistable() {
    let out = run(&["expand", "--basis", "phi", "w/2"]);
    assert_eq!(code(&out), 1);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("g0"), "diagnostic should list coordinates: {err}");
}

#[test]
fn parse_errors_are_usage_errors() {
    assert_eq!(code(&run(&["expand", "w^"])), 2);
    assert_eq!(code(&run(&["weight", "1/(w-1)"])), 2);
}

#[test]
fn integrality_verdicts() {
    let out = run(&["check-integrality", "--prime", "2", "(w-1)/2"]);
    assert_eq!(code(&out), 0);
    let doc: IntegralityDoc = json(&out);
    assert!(doc.semistable);

    let out = run(&["check-integrality", "--prime", "3", "w/3"]);
    assert_eq!(code(&out), 1);
    let doc: IntegralityDoc = json(&out);
    assert!(!doc.semistable);

    let out = run(&["check-integrality", "--prime", "3", "--budget", "10", "(w^2-1)/81"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn weight_of_g2() {
    let doc: WeightDoc = json(&run(&["weight", "(w-1)*(w-3)/8"]));
    assert_eq!(doc.weight.0, Valuation::Finite(-3));
    assert_eq!(doc.argmin, [2]);
    let doc: WeightDoc = json(&run(&["weight", "0"]));
    assert_eq!(doc.weight.0, Valuation::Infinite);
}

#[test]
fn verify_at_two() {
    let out = run(&["verify", "--prime", "2", "--max-n", "16", "--max-k", "12"]);
    assert_eq!(code(&out), 0);
    let doc: VerifyDoc = json(&out);
    assert!(doc.pass);
    let report = congruences_from_docs(&doc.congruences).unwrap();
    assert!(report.all_pass());
    assert!(doc.congruences.iter().any(|c| c.claim == "g_vs_phi_monomial" && c.n == 16));
}

#[test]
fn verify_at_three() {
    let out = run(&["verify", "--prime", "3", "--max-n", "3", "--max-k", "9"]);
    assert_eq!(code(&out), 0);
    let doc: VerifyDoc = json(&out);
    assert!(doc.pass && doc.congruences.is_empty());
}

#[test]
fn non_prime_is_a_usage_error() {
    assert_eq!(code(&run(&["verify", "--prime", "4", "--max-n", "2"])), 2);
    assert_eq!(code(&run(&["phi", "--prime", "1", "--n", "2"])), 2);
}

#[test]
fn margolis_pieces() {
    let out = run(&["margolis", "--prime", "2", "--k", "4"]);
    assert_eq!(code(&out), 0);
    let docs: Vec<MargolisDoc> = json(&out);
    assert_eq!(docs.len(), 1);
    assert_eq!(docs[0].basis.len(), 7);
    assert_eq!(docs[0].cover_rank, 3);
    assert_eq!(docs[0].homology.q0.groups[0].generators, [vec![(1, "z1^8".to_string())]]);
    assert_eq!(docs[0].homology.q1.groups[0].generators, [vec![(1, "z3^2".to_string())]]);

    let docs: Vec<MargolisDoc> = json(&run(&["margolis", "--prime", "3", "--max-k", "3"]));
    assert_eq!(docs.iter().map(|d| d.k).collect::<Vec<_>>(), [0, 1, 2, 3]);
}

#[test]
fn budget_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_coopbasis"))
        .args(["margolis", "--k", "4"])
        .env("COOPBASIS_BUDGET", "3")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    // An explicit flag wins over the environment.
    let out = Command::new(env!("CARGO_BIN_EXE_coopbasis"))
        .args(["margolis", "--k", "4", "--budget", "100"])
        .env("COOPBASIS_BUDGET", "3")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
}

#[test]
fn output_file_and_formats() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("phi.csv");
    let out = run(&["phi", "--n", "2", "--format", "csv", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, "n,degree,af,polynomial\n1,1,-1,(w - 1)/2\n2,3,-3,(2w^3 - w^2 + 2w - 3)/8\n");

    let out = run(&["margolis", "--k", "2", "--format", "pretty"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("p  k  monomials"), "{text}");

    let missing = dir.path().join("no/such/dir/out.json");
    assert_eq!(code(&run(&["g", "--n", "1", "--out", missing.to_str().unwrap()])), 2);
}
