use std::path::PathBuf;

use circle_subgroups::cli::{run, Outcome};
use serde_json::Value;

fn charsub(args: &str) -> Outcome {
    run(std::iter::once("charsub").chain(args.split_whitespace()))
}

fn schema(name: &str) -> jsonschema::JSONSchema {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../schemas").join(format!("{name}.json"));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    jsonschema::JSONSchema::compile(&doc).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn validated(name: &str, args: &str) -> Value {
    let out = charsub(args);
    assert_eq!(out.code, 0, "{args}: {}", out.stderr);
    let value: Value = serde_json::from_str(&out.stdout).unwrap();
    let compiled = schema(name);
    if let Err(errors) = compiled.validate(&value) {
        let msgs: Vec<String> = errors.map(|e| format!("{e} at {}", e.instance_path)).collect();
        panic!("{args} does not match {name}: {msgs:?}");
    }
    value
}

#[test]
fn every_subcommand_matches_its_schema() {
    let cases = [
        ("seq-gen", "seq gen --seq ratios:2,3:repeat --count 6"),
        ("seq-derive", "seq derive --seq factorial --blocks 5"),
        ("orbit", "orbit --seq factorial --derived --x 1/7 --horizon 30"),
        ("member", "member --seq geometric:2 --x 1/3"),
        ("verify-t0", "verify-t0 --seq factorial --derived --horizon 40"),
        ("density", "density --set geometric:3/2 --horizon 500 --tail-start 10"),
        ("lift", "lift --seq factorial --blocks 10 --set every:2"),
        ("c1", "c1 --seq ratios::pow2 --blocks 30 --tau 2"),
        ("c2-search", "c2-search --seq factorial --blocks 40 --tail-start 100"),
        ("blocks", "blocks --seq ratios::pow2 --x 1/3 --eps 1/10 --blocks 20"),
        ("smember", "smember --seq geometric:3 --x 1/2"),
        ("strace", "strace --seq factorial --derived --x 2/7 --eps 1/10 --horizon 200 --tail-start 20"),
        ("lemma-l1", "lemma l1 --low 1/7 --high 6/7 --alpha 1/2"),
        ("lemma-l1-random", "lemma l1 --cases 200"),
        ("lemma-l2", "lemma l2 --pmax 50 --denmax 16"),
        ("lemma-l3", "lemma l3 --seq geometric:10 --x 1/7 --eps 1/14 --l 3"),
        ("lemma-b1", "lemma b1 --seq geometric:3 --z 1/10"),
        ("experiment-kunen", "experiment kunen --q 15"),
        ("experiment-t1", "experiment t1 --seq ratios::pow2 --x 1/3 --eps 1/10 --blocks 12"),
    ];
    for (name, args) in cases {
        validated(name, args);
    }
}

#[test]
fn documented_examples() {
    let v = validated("member", "member --seq factorial --derived --x 1/3");
    assert_eq!(v["status"], "member");
    let v = validated("member", "member --seq geometric:2 --x 0/1");
    assert_eq!(v["status"], "member");
    let v = validated("lemma-l2", "lemma l2 --pmax 300 --denmax 64 --eps 1/10,1/20,1/100");
    assert_eq!(v["failures"].as_array().unwrap().len(), 0);
    assert_eq!(v["min_slack"], "7/9");
    let v = validated("lift", "lift --seq factorial --blocks 10 --set explicit:2,4");
    assert_eq!(v["ranges"], serde_json::json!([[2, 3], [7, 10]]));
    let v = validated("experiment-kunen", "experiment kunen --q 30");
    assert_eq!(v["failures"].as_array().unwrap().len(), 0);
}

#[test]
fn nonmember_certificates() {
    let v = validated("member", "member --seq geometric:2 --x 1/3");
    assert_eq!(v["status"], "non_member");
    assert_eq!(v["certificate"]["kind"], "persistent_residue");
    let v = validated("smember", "smember --seq geometric:2 --x 1/3");
    assert_eq!(v["certificate"]["kind"], "density_lower_bound");
}

#[test]
fn usage_errors_exit_2_with_json() {
    let compiled = schema("error");
    for args in [
        "",
        "member --seq geometric:2",
        "member --seq nonsense --x 1/3",
        "member --seq geometric:2 --x 1/0",
        "lemma l2 --eps 1/9",
        "density --set every:2 --horizon 10 --tail-start 11",
        "orbit --seq geometric:2 --x 1/3 --csv --json",
        "member --seq geometric:2 --x 1/3 --csv",
    ] {
        let out = charsub(args);
        assert_eq!(out.code, 2, "{args:?}");
        assert!(out.stdout.is_empty());
        let err: Value = serde_json::from_str(&out.stderr).unwrap_or_else(|e| panic!("{args:?}: {e}: {}", out.stderr));
        assert!(compiled.is_valid(&err), "{args:?}");
    }
}

#[test]
fn assertion_failures_exit_1() {
    let out = charsub("lemma l3 --seq factorial --x 1/3 --eps 1/10 --l 1 --blocks 10");
    assert_eq!(out.code, 2, "hypothesis violation is a usage error");
    let out = charsub("experiment t1 --seq ratios:2:repeat --x 1/3 --eps 1/10 --blocks 10");
    assert_eq!(out.code, 0, "{}", out.stderr);
    let out = charsub("c1 --seq factorial --blocks 20 --tau 2");
    assert_eq!(out.code, 1);
    let v: Value = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(v["per_block"][2]["holds"], false);
    let out = charsub("lemma b1 --seq explicit:2,4 --z 1/1000 --count 2");
    assert_eq!(out.code, 1);
    assert_eq!(serde_json::from_str::<Value>(&out.stderr).unwrap()["error"], "horizon_exhausted");
}

#[test]
fn csv_output_uses_header_and_lf() {
    let out = charsub("seq gen --seq factorial --count 4 --csv");
    assert_eq!(out.code, 0);
    assert_eq!(out.stdout, "n,a_n,q_n\n1,1,1\n2,2,2\n3,6,3\n4,24,4\n");
    let out = charsub("blocks --seq factorial --x 1/5 --eps 1/5 --blocks 5 --csv");
    assert_eq!(out.stdout.lines().nth(4).unwrap(), "4,4,4,4");
    assert!(!out.stdout.contains('\r'));
}

#[test]
fn output_is_deterministic_across_workers() {
    for args in ["lemma l2 --pmax 120 --denmax 40", "lemma l1 --cases 500 --seed 7", "c2-search --seq factorial --blocks 50 --tail-start 300"] {
        let one = charsub(&format!("{args} --workers 1"));
        let many = charsub(&format!("{args} --workers 3"));
        let again = charsub(&format!("{args} --workers 1"));
        assert_eq!(one, many, "{args}");
        assert_eq!(one, again, "{args}");
    }
    assert_ne!(charsub("lemma l1 --cases 500 --seed 1").stdout, charsub("lemma l1 --cases 500 --seed 2").stdout);
}
