use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn kontact(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kontact")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn corpus(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../structures").join(name).display().to_string()
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

/// Compare with a checked-in file; `UPDATE_GOLDEN=1` rewrites it.
fn assert_golden(name: &str, actual: &str) {
    let path = golden(name);
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, actual).unwrap();
    }
    let expected = std::fs::read_to_string(&path).unwrap();
    assert_eq!(actual, expected, "output differs from {}", path.display());
}

#[test]
fn verify_passes_on_darboux_weak() {
    let o = kontact(&["verify", "--builtin", "darboux-weak-n2"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).ends_with("verdict: PASS\n"));
}

#[test]
fn verify_json_is_a_check_array_and_golden() {
    let o = kontact(&["verify", "--builtin", "darboux-sasakian-n1", "--json"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let v: Value = serde_json::from_str(&text).unwrap();
    let arr = v.as_array().unwrap();
    assert!(arr.len() > 20);
    for c in arr {
        let keys: Vec<&str> = c.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys, ["bound", "check_name", "mandatory", "pass", "residual", "tol", "witness_point"]);
    }
    // Sasakian: the informational checks pass too
    assert!(arr.iter().all(|c| c["pass"] == Value::Bool(true)));
    assert_golden("verify_darboux_sasakian_n1.json", &text);
}

#[test]
fn reports_are_byte_identical_for_equal_seeds() {
    let a = kontact(&["classify", "--builtin", "darboux-weak-n1", "--json", "--seed", "7", "--samples", "5"]);
    let b = kontact(&["classify", "--builtin", "darboux-weak-n1", "--json", "--seed", "7", "--samples", "5"]);
    let c = kontact(&["classify", "--builtin", "darboux-weak-n1", "--json", "--seed", "8", "--samples", "5"]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn corrupted_file_exits_two_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("corrupted.kmu");
    let text = std::fs::read_to_string(corpus("darboux_weak_n1.kmu")).unwrap();
    std::fs::write(&path, text.replace("xi.3 = \"2\"", "xi.3 = \"2")).unwrap();
    let o = kontact(&["verify", path.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 11, column"), "{}", stderr(&o));
}

#[test]
fn axiom_failure_in_file_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.kmu");
    let text = std::fs::read_to_string(corpus("darboux_sasakian_n1.kmu")).unwrap();
    std::fs::write(&path, text.replace("g.2.2 = \"1/4\"", "g.2.2 = \"1/2\"")).unwrap();
    let o = kontact(&["verify", "--spec", path.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("FAIL  d eta = 2 g(., phi .)"));
    // the other commands insist on a valid structure
    assert_eq!(code(&kontact(&["classify", path.to_str().unwrap()])), 2);
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(code(&kontact(&["verify", "--builtin", "torus"])), 2);
    assert_eq!(code(&kontact(&["verify"])), 2);
    assert_eq!(code(&kontact(&["verify", "/nonexistent.kmu"])), 2);
    assert_eq!(code(&kontact(&["verify", "--builtin", "lie(1,2)", "--tol", "0"])), 2);
    assert_eq!(code(&kontact(&["deform", "--builtin", "lie(1,2)", "--a", "-1"])), 2);
    assert_eq!(code(&kontact(&["sweep", "--c1", "1:0:1"])), 2);
    assert_eq!(code(&kontact(&["frobnicate"])), 2);
}

#[test]
fn classify_darboux_weak_is_boundary() {
    let o = kontact(&["classify", "--builtin", "darboux-weak-n2", "--json"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["kappa_mu"]["kappa"].as_f64().unwrap().abs() < 1e-9);
    assert!(v["kappa_mu"]["mu"].as_f64().unwrap().abs() < 1e-9);
    assert!((v["boeckx"]["I_M"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(v["boeckx"]["regime"], "Boundary");
    assert_eq!(v["weakly_kappa_mu"], true);
}

#[test]
fn classify_sasakian_and_lie() {
    let o = kontact(&["classify", "--builtin", "darboux-sasakian-n2", "--json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["boeckx"]["regime"], "Kcontact");
    let o = kontact(&["classify", &corpus("lie_4_0.kmu"), "--json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["kappa_mu"]["kappa"].as_f64().unwrap() + 3.0).abs() < 1e-12);
    assert!((v["kappa_mu"]["mu"].as_f64().unwrap() + 2.0).abs() < 1e-12);
    assert_eq!(v["boeckx"]["regime"], "Boundary");
}

#[test]
fn deform_writes_a_loadable_structure() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.kmu");
    let o = kontact(&["deform", "--builtin", "darboux-weak-n2", "--a", "2", "--json", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["measured"]["kappa"].as_f64().unwrap() - 0.75).abs() < 1e-9);
    assert!((v["measured"]["mu"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    assert_eq!(v["predicted"]["kappa"], 0.75);
    let o = kontact(&["classify", out.to_str().unwrap(), "--json"]);
    let w: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((w["kappa_mu"]["kappa"].as_f64().unwrap() - 0.75).abs() < 1e-9);
    let table = stdout(&kontact(&["deform", "--builtin", "darboux-weak-n2", "--a", "2"]));
    assert!(table.contains("predicted") && table.contains("measured"));
}

#[test]
fn construct_gates_and_outputs() {
    let o = kontact(&["construct", "--builtin", "darboux-weak-n2", "--target", "mu2"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("Boundary"));
    assert_eq!(code(&kontact(&["construct", &corpus("lie_2_2.kmu"), "--target", "kcontact"])), 3);

    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k.kmu");
    let o = kontact(&["construct", &corpus("lie_3_1.kmu"), "--target", "kcontact", "--json", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["target"], "kcontact");
    let o = kontact(&["verify", out.to_str().unwrap(), "--json"]);
    assert_eq!(code(&o), 0);
    let checks: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let h = checks.as_array().unwrap().iter().find(|c| c["check_name"] == "h = 0").unwrap();
    assert_eq!(h["pass"], true);

    let o = kontact(&["construct", &corpus("lie_m2_1.kmu"), "--target", "mu2"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn sweep_csv_covers_both_sides_of_one() {
    let o = kontact(&["sweep", "--c1", "-6:6:0.5", "--c2", "-6:6:0.5"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("c1,c2,kappa,mu,lambda,I,regime"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 25 * 25);
    assert!(rows.iter().all(|r| r.len() == 7));
    let regimes: Vec<&str> = rows.iter().map(|r| r[6]).collect();
    assert!(regimes.iter().any(|r| *r == "AboveOne" || *r == "BelowMinusOne"));
    assert!(regimes.contains(&"Interior"));
    let big = rows.iter().filter_map(|r| r[5].parse::<f64>().ok()).filter(|i| i.abs() > 1.0).count();
    let small = rows.iter().filter_map(|r| r[5].parse::<f64>().ok()).filter(|i| i.abs() < 1.0).count();
    assert!(big > 0 && small > 0);
}

#[test]
fn sweep_writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let o = kontact(&["sweep", "--c1", "0:1:1", "--c2", "0:1:1", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(out).unwrap().lines().count(), 5);
}
