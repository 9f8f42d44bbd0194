use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn channel(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("channels").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_macpolar"))
        .args(args)
        .env_remove("MACPOLAR_TOLERANCES")
        .output()
        .expect("spawn macpolar")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

#[test]
fn check_exit_codes() {
    let bac = channel("bac.json");
    let and = channel("and.json");
    assert_eq!(run(&["check", bac.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(run(&["check", and.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["check", "/no/such/file.json"]).status.code(), Some(1));
    assert_eq!(run(&["check", "--bogus"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn full_set_and_out_of_range_masks_are_errors() {
    let bac = channel("bac.json");
    let bac = bac.to_str().unwrap();
    for mask in ["3", "0b100", "0"] {
        let o = run(&["check", bac, "--subset", mask]);
        assert_eq!(o.status.code(), Some(1), "mask {mask}");
    }
    assert_eq!(run(&["check", bac, "--subset", "0b01"]).status.code(), Some(0));
}

#[test]
fn text_report_names_the_evidence() {
    let and = channel("and.json");
    let o = run(&["check", and.to_str().unwrap(), "--format", "text"]);
    let text = stdout(&o);
    assert!(text.contains("S = {1}: NOT compatible"), "{text}");
    assert!(text.contains("fingerprint-ill-defined"), "{text}");
    assert!(text.contains("no a with I(X+aY;Y|Z) = 0"), "{text}");
    assert!(text.ends_with("region: not preserved\n"), "{text}");
    assert!(!text.contains("machine-readable"));
}

#[test]
fn both_format_appends_json() {
    let bac = channel("bac.json");
    let o = run(&["region", bac.to_str().unwrap()]);
    let text = stdout(&o);
    let (human, machine) = text.split_once("--- machine-readable ---\n").expect("separator");
    assert!(human.contains("sum capacity   = 1.500000 bits"), "{human}");
    let v: Value = serde_json::from_str(machine).unwrap();
    assert!((v["sum_capacity"].as_f64().unwrap() - 1.5).abs() < 1e-12);
}

#[test]
fn check_json_carries_the_witness() {
    let bac = channel("bac.json");
    let v = json(&run(&["check", bac.to_str().unwrap(), "--format", "json", "--subset", "1"]));
    assert_eq!(v["preserved"], true);
    let w = v["subsets"][0]["witness"].as_array().unwrap();
    assert_eq!(w.len(), 4);
    let last = &w[3];
    assert_eq!(last["xhat"], "1");
    assert_eq!(last["y"], "1");
    assert_eq!(last["phase_turns"], 0.5);
    assert_eq!(v["subsets"][0]["shortcuts"]["prime_field"], 1);
    assert!(v["subsets"][0]["shortcuts"].get("coprime").is_none());
}

#[test]
fn polarize_sum_rate_is_conserved() {
    let bac = channel("bac.json");
    let bac = bac.to_str().unwrap();
    let rate = |seq: &str| {
        let v = json(&run(&["polarize", bac, "--seq", seq, "--format", "json"]));
        v["region"]["sum_capacity"].as_f64().unwrap()
    };
    assert!((rate("-") + rate("+") - 3.0).abs() < 1e-9);
    let unmerged = json(&run(&["polarize", bac, "--seq=+", "--no-merge", "--format", "json"]));
    assert_eq!(unmerged["merged"], false);
    assert_eq!(run(&["polarize", bac, "--seq", "-x"]).status.code(), Some(1));
    assert_eq!(run(&["polarize", bac, "--seq", "----", "--max-depth", "3"]).status.code(), Some(1));
}

#[test]
fn oracle_reports_each_set() {
    let and = channel("and.json");
    let o = run(&["oracle", and.to_str().unwrap(), "--depth", "1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let verdicts = v["verdicts"].as_array().unwrap();
    assert_eq!(verdicts.len(), 3);
    assert_eq!(verdicts[0]["preserved"], false);
    assert_eq!(verdicts[0]["failing_depth"], 1);
    assert_eq!(verdicts[2]["preserved"], true);
    assert!(v["disagreements"].as_array().unwrap().is_empty());
    assert!(v["limitation"].as_str().unwrap().contains("finite depth"));
}

#[test]
fn tolerances_come_from_the_environment() {
    let bac = channel("bac.json");
    let o = Command::new(env!("CARGO_BIN_EXE_macpolar"))
        .args(["check", bac.to_str().unwrap(), "--format", "json"])
        .env("MACPOLAR_TOLERANCES", "1e-10,1e-8,1e-7")
        .output()
        .unwrap();
    let v = json(&o);
    assert_eq!(v["tolerances"]["zero"], 1e-10);
    assert_eq!(v["tolerances"]["oracle"], 1e-7);
    let bad = Command::new(env!("CARGO_BIN_EXE_macpolar"))
        .args(["check", bac.to_str().unwrap()])
        .env("MACPOLAR_TOLERANCES", "1e-10,x")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("MACPOLAR_TOLERANCES"));
}

#[test]
fn corpus_files_load_back() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("corpus");
    let o = run(&["corpus", out.to_str().unwrap(), "--count", "5", "--seed", "11"]);
    assert_eq!(o.status.code(), Some(0));
    let mut names: Vec<_> = std::fs::read_dir(&out).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    assert_eq!(names.len(), 5);
    let first = out.join(&names[0]);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&first).unwrap()).unwrap();
    assert_eq!(v["metadata"]["seed"], 11);
    let o = run(&["region", first.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn cross_validation_agrees_on_the_adder() {
    let bac = channel("bac.json");
    let o = run(&["check", bac.to_str().unwrap(), "--cross-validate", "--format", "text"]);
    let text = stdout(&o);
    assert_eq!(text.matches("agrees with witness").count(), 6, "{text}");
}
