use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_galoiswb")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited")
}

fn temp_file(contents: &str, suffix: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(suffix).tempfile().unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    f
}

#[test]
fn check_class_graphs_passes() {
    let out = run(&["check-class", "graphs", "--size", "4"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["theorem"], "fraisse_axioms");
    assert!(v["violations"].as_array().unwrap().is_empty());
}

#[test]
fn check_class_forests_prints_ap_witness() {
    let out = run(&["check-class", "forests", "--size", "4"]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_eq!(v["details"]["ap"], false);
    assert_eq!(v["details"]["hp"], true);
    assert_eq!(v["violations"][0]["axiom"], "AP");
    assert!(v["violations"][0]["span"]["apex"].is_object());
}

#[test]
fn unknown_class_is_usage_error() {
    let out = run(&["check-class", "no_such", "--size", "2"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("no_such"));
}

#[test]
fn zero_bound_is_usage_error() {
    assert_eq!(code(&run(&["check-class", "graphs", "--size", "0"])), 2);
}

#[test]
fn bad_flag_is_usage_error() {
    assert_eq!(code(&run(&["check-class", "graphs", "--nope"])), 2);
}

#[test]
fn build_limit_sets_grows() {
    let out = run(&["build-limit", "sets", "--rounds", "3"]);
    assert_eq!(code(&out), 0);
    let sizes: Vec<usize> = serde_json::from_value(json(&out)["sizes"].clone()).unwrap();
    assert_eq!(sizes.len(), 4);
    assert!(sizes.windows(2).all(|w| w[0] < w[1]), "{sizes:?}");
}

#[test]
fn build_limit_graphs_is_three_universal() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("chain.json");
    let out = run(&["build-limit", "graphs", "--rounds", "3", "--bound", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["certificates"]["universal"], true);
    assert_eq!(v["certificates"]["universal_upto"], 3);
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(written, v);
}

#[test]
fn build_limit_forests_fails_with_span() {
    let out = run(&["build-limit", "forests", "--rounds", "3"]);
    assert_eq!(code(&out), 1);
    let err = String::from_utf8_lossy(&out.stderr);
    let span: Value = serde_json::from_str(err.split("span: ").nth(1).unwrap().trim()).unwrap();
    assert_eq!(span["apex"]["carrier"]["V"].as_array().unwrap().len(), 2);

    // two rounds only see problems over a single vertex
    let out = run(&["build-limit", "forests", "--rounds", "2"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["certificates"]["universal"], false);
}

#[test]
fn carrier_limit_overflow_exits_three() {
    let out = run(&["build-limit", "graphs", "--rounds", "3", "--carrier-limit", "2"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn coherence_on_boolean_algebras_overflows() {
    assert_eq!(code(&run(&["verify", "coherence", "--class", "boolean_algebras"])), 3);
}

#[test]
fn verify_z15() {
    let out = run(&["verify", "z15"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["details"]["summary"], "counterexample confirmed");
}

#[test]
fn verify_galois_graphs() {
    let out = run(&["verify", "galois", "--class", "graphs", "--size", "3"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!(v["cases"].as_u64().unwrap() > 0);
    assert!(v["violations"].as_array().unwrap().is_empty());
}

#[test]
fn verify_galois_needs_class() {
    assert_eq!(code(&run(&["verify", "galois"])), 2);
}

#[test]
fn verify_imaginaries_sets() {
    let out = run(&["verify", "imaginaries", "--class", "sets", "--size", "2"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["details"]["summary"], "atomically complete: false");
    let swap = v["details"]["witnesses"]
        .as_array()
        .unwrap()
        .iter()
        .find(|w| w["seed"]["h"] == serde_json::json!([0, 1]) && w["seed"]["k"] == serde_json::json!([1, 0]));
    let swap = swap.expect("swap witness");
    assert_eq!(swap["base"]["carrier"]["X"].as_array().unwrap().len(), 2);
}

#[test]
fn atoms_and_discrete_default_to_klein_four() {
    let out = run(&["verify", "atoms"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["details"]["context"], "v4_subgroups");
    assert_eq!(v["details"]["aut_order"], 6);
    assert_eq!(v["details"]["subgroups"], 6);

    let out = run(&["verify", "discrete"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["details"]["all_strict_monos"], true);
    assert_eq!(v["details"]["image"]["missing"].as_array().unwrap().len(), 1);
}

#[test]
fn discrete_without_largest_object_is_usage_error() {
    assert_eq!(code(&run(&["verify", "discrete", "--class", "graphs"])), 2);
}

#[test]
fn text_format() {
    let out = run(&["--format", "text", "verify", "z15"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("z15_counterexample: PASS"));
}

#[test]
fn config_file_supplies_defaults() {
    let cfg = temp_file("jobs = 2\n[verify.galois]\nclass = \"sets\"\nsize = 2\nstages = 2\n", ".toml");
    let out = run(&["--config", cfg.path().to_str().unwrap(), "verify", "galois"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["details"]["class"], "sets");
    assert_eq!(v["details"]["size_bound"], 2);

    // flags win over the file
    let out = run(&["--config", cfg.path().to_str().unwrap(), "verify", "galois", "--size", "3"]);
    assert_eq!(json(&out)["details"]["size_bound"], 3);
}

#[test]
fn malformed_config_is_usage_error() {
    let cfg = temp_file("[check-class]\nsize = \"big\"\n", ".toml");
    assert_eq!(code(&run(&["--config", cfg.path().to_str().unwrap(), "check-class", "graphs"])), 2);
    assert_eq!(code(&run(&["--config", "/nonexistent/cfg.toml", "verify", "z15"])), 2);
}

#[test]
fn class_file_is_accepted() {
    let class = r#"{"name": "triangle_free", "signature": {"sorts": ["V"], "relations": [{"name": "E", "arity": ["V", "V"], "props": ["symmetric", "irreflexive"]}]},
        "forbidden": [{"carrier": {"V": ["a","b","c"]},
                       "relations": {"E": [["a","b"],["b","a"],["b","c"],["c","b"],["a","c"],["c","a"]]}}]}"#;
    let f = temp_file(class, ".json");
    let out = run(&["check-class", f.path().to_str().unwrap(), "--size", "4"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn aut_orbits_and_cosets() {
    let path = temp_file(
        r#"{"signature": {"sorts": ["V"], "relations": [{"name": "E", "arity": ["V", "V"], "props": ["symmetric", "irreflexive"]}]}, "carrier": {"V": ["0","1","2","3"]},
            "relations": {"E": [["0","1"],["1","0"],["1","2"],["2","1"],["2","3"],["3","2"]]}}"#,
        ".json",
    );
    let p = path.path().to_str().unwrap();
    let out = run(&["aut", p]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["point_orbits"], 2);

    let out = run(&["orbits", p, "--k", "2", "--distinct"]);
    assert_eq!(json(&out)["aut_order"], 2);
    // 12 ordered pairs of distinct vertices, all free orbits
    assert_eq!(json(&out)["count"], 6);

    let group = temp_file(r#"{"degree": 3, "generators": [[1,0,2],[0,2,1]]}"#, ".json");
    let out = run(&["cosets", group.path().to_str().unwrap(), "--source", "[[1,0,2]]", "--target", "[[2,1,0]]"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["arrows"].as_array().unwrap().len(), 2);
    assert_eq!(v["conjugate"], true);
    assert_eq!(v["double_cosets"]["count"], 2);
    assert_eq!(v["complete_discrete"], true);

    let out = run(&["cosets", group.path().to_str().unwrap(), "--source", "[[1,2,0,3]]"]);
    assert_eq!(code(&out), 2);
}
