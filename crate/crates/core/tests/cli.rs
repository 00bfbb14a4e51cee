use lpcc::cli::{run, Output};
use serde_json::Value;

fn lpcc(args: &[&str]) -> Output {
    run(std::iter::once("lpcc").chain(args.iter().copied()))
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let out = lpcc(&all);
    let v: Value = serde_json::from_str(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", out.stdout));
    assert_eq!(v["exit_code"], out.code);
    v
}

#[test]
fn usage_errors_exit_64() {
    assert_eq!(lpcc(&["bogus"]).code, 64);
    assert_eq!(lpcc(&["sets", "show"]).code, 64);
    assert_eq!(lpcc(&["sets", "show", "--name", "NoSuchSet"]).code, 64);
    assert_eq!(lpcc(&["theorem", "9"]).code, 64);
}

#[test]
fn orthogonality_check_codes() {
    assert_eq!(lpcc(&["sets", "check", "--kets", "00,11", "--dims", "2,2"]).code, 0);
    let bad = lpcc(&["sets", "check", "--kets", "00,01+00", "--dims", "2,2"]);
    assert_eq!(bad.code, 1);
    assert!(bad.stdout.contains("not orthogonal"));
    assert_eq!(lpcc(&["sets", "check", "--name", "S1m", "--m", "2"]).code, 0);
}

#[test]
fn report_carries_input_digest() {
    let a = json(&["sets", "show", "--name", "S1"]);
    let b = json(&["sets", "show", "--name", "S1"]);
    let c = json(&["sets", "show", "--name", "S2"]);
    let digest = |v: &Value| v["inputs"][0]["sha256"].as_str().unwrap().to_string();
    assert_eq!(digest(&a).len(), 64);
    assert_eq!(digest(&a), digest(&b));
    assert_ne!(digest(&a), digest(&c));
    assert_eq!(a["verdict"], "confirmed");
}

#[test]
fn exported_set_reads_back() {
    let exported = lpcc(&["sets", "export", "--name", "Domino"]);
    assert_eq!(exported.code, 0);
    let path = std::env::temp_dir().join(format!("lpcc-cli-{}.json", std::process::id()));
    std::fs::write(&path, &exported.stdout).unwrap();
    let out = lpcc(&["sets", "check", "--file", path.to_str().unwrap()]);
    std::fs::remove_file(&path).ok();
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("9 states"));
}

#[test]
fn solver_reports_no_direction_for_alice_on_s2() {
    let v = json(&["solve", "--name", "S2", "--group", "A", "--exact-only"]);
    assert_eq!(v["result"]["rank1"]["none_found"], "exact-case-split");
    assert_eq!(v["result"]["rank1"]["complete"], true);
}

#[test]
fn measurement_branches_partition_states() {
    let v = json(&["measure", "apply", "--name", "S1", "--group", "B", "--pvm", "0;1"]);
    let branches = v["result"].as_array().unwrap();
    assert_eq!(branches.len(), 2);
    let total: usize = branches
        .iter()
        .map(|b| b["set"]["states"].as_array().unwrap().len())
        .sum();
    assert!(total >= 9);
}

#[test]
fn theorems_and_lemma_replay() {
    for n in ["1", "2", "3", "4", "5"] {
        let out = lpcc(&["theorem", n]);
        assert_eq!(out.code, 0, "theorem {n}:\n{}", out.stdout);
        assert!(!out.stdout.contains("[FAIL]"));
    }
    assert_eq!(lpcc(&["lemma", "1"]).code, 0);
}

#[test]
fn activation_fixture_confirmed() {
    let v = json(&["activate", "--fixture", "s2-activation-bc"]);
    assert_eq!(v["verdict"], "confirmed");
    assert_eq!(v["result"]["activated"], true);
}

#[test]
fn strong_activability_of_s1() {
    let out = lpcc(&["classify", "--name", "S1", "--m", "3", "--strong"]);
    assert_eq!(out.code, 0, "{}", out.stdout);
}

#[test]
fn diagram_formats() {
    let ascii = lpcc(&["diagram", "--name", "Domino", "--partition", "A|B"]);
    assert_eq!(ascii.code, 0);
    assert_eq!(ascii.stdout.lines().count(), 5);
    let svg = lpcc(&["diagram", "--name", "Domino", "--partition", "A|B", "--format", "svg"]);
    assert!(svg.stdout.trim_start().starts_with("<svg"));
    assert!(svg.stdout.trim_end().ends_with("</svg>"));
    assert_eq!(lpcc(&["diagram", "--name", "S1", "--partition", "A|B|C"]).code, 64);
}
