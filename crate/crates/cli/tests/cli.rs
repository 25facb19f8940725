use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn hvlie(args: &[&str]) -> Output {
    hvlie_env(args, &[])
}

fn hvlie_env(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hvlie"));
    cmd.args(args).env_remove("HVLIE_SEED");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf8")
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).expect("one JSON document")
}

fn config_file(body: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().expect("temp file");
    f.write_all(body.as_bytes()).expect("write");
    f
}

#[test]
fn classify_single_case_has_one_dimensional_solution() {
    let o = hvlie(&["--format", "json", "classify", "--case", "I", "--a", "1/3", "--b", "5", "--N", "8", "--G", "2"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["schema"], "hvlie/1");
    assert_eq!(v["status"], "pass");
    assert_eq!(v["data"][0]["linear_dim"], 1);
    assert_eq!(v["checks"][0]["detail"], "dim 1");
}

#[test]
fn classify_accepts_full_case_form_and_negative_rationals() {
    let o = hvlie(&["--format", "json", "classify", "--case", "CaseI(a=-2/5,b=0)"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = hvlie(&["--format", "json", "classify", "--case", "II", "--a", "-3/7"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn json_output_is_byte_identical_across_runs() {
    let args = ["--format", "json", "--seed", "77", "scan-submodules", "--N", "8", "--G", "2"];
    let a = hvlie(&args);
    let b = hvlie(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let args = ["--format", "json", "classify", "--case", "IV"];
    assert_eq!(hvlie(&args).stdout, hvlie(&args).stdout);
}

#[test]
fn seed_precedence_is_config_then_env_then_flag() {
    let cfg = config_file("command = \"scan-submodules\"\nseed = 11\nN = 8\nG = 2\nformat = \"json\"\n");
    let path = cfg.path().to_str().unwrap();
    let seed = |o: &Output| json(o)["config"]["seed"].as_u64().unwrap();
    assert_eq!(seed(&hvlie(&["--config", path])), 11);
    assert_eq!(seed(&hvlie_env(&["--config", path], &[("HVLIE_SEED", "22")])), 22);
    assert_eq!(seed(&hvlie_env(&["--config", path, "--seed", "33"], &[("HVLIE_SEED", "22")])), 33);
}

#[test]
fn config_file_supplies_cases() {
    let cfg = config_file("command = \"classify\"\ncases = [\"CaseIII(a=1/2)\", \"IV\"]\nformat = \"json\"\n");
    let o = hvlie(&["--config", cfg.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["config"]["cases"], serde_json::json!(["CaseIII(a=1/2)", "CaseIV()"]));
    assert_eq!(v["checks"].as_array().unwrap().len(), 2);
}

#[test]
fn verify_boson_reports_resolved_central_charges() {
    let o = hvlie(&["verify-boson", "--max-index", "4"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("central charges read from the vacuum"));
    assert!(text.contains("C_L=2, C_I=1, C_LI=1/2"));
    assert!(text.ends_with("status: pass\n"));
}

#[test]
fn scan_finds_the_missing_vector_of_a_reducible_module() {
    let o = hvlie(&["scan-submodules", "--family", "A[a=2,b=0,c=0]", "--N", "10", "--G", "3"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("A[a=2,b=0,c=0]: {-2}"), "{}", stdout(&o));
}

#[test]
fn mutated_bracket_fails_with_witness_triple() {
    let o = hvlie(&["--format", "json", "--mutate", "verify-algebra", "--max-index", "3"]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    assert_eq!(v["status"], "fail");
    let jacobi = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "Jacobi identity").unwrap();
    assert_eq!(jacobi["status"], "fail");
    for k in ["x", "y", "z", "residual"] {
        assert!(jacobi["witness"][k].is_string(), "missing {k}");
    }
}

#[test]
fn self_test_passes_when_mutations_are_caught() {
    let o = hvlie(&["self-test"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn exit_codes_are_distinct_per_error_kind() {
    assert_eq!(code(&hvlie(&["no-such-command"])), 2);
    assert_eq!(code(&hvlie(&[])), 2);
    assert_eq!(code(&hvlie(&["classify", "--case", "I", "--a", "1/0", "--b", "1"])), 3);
    assert_eq!(code(&hvlie(&["classify", "--case", "I", "--a", "x", "--b", "1"])), 3);
    assert_eq!(code(&hvlie(&["classify", "--case", "I", "--a", "1/3", "--b", "1", "--N", "5", "--G", "2"])), 4);
    assert_eq!(code(&hvlie(&["scan-submodules", "--family", "A[a=1/2,b=0,c=0]", "--N", "3", "--G", "3"])), 4);
    assert_eq!(code(&hvlie(&["scan-submodules", "--family", "Q[a=1]"])), 5);
    assert_eq!(code(&hvlie(&["classify", "--case", "V"])), 5);
    assert_eq!(code(&hvlie(&["--config", "/nonexistent/hvlie.toml"])), 6);
    let bad = config_file("command = [\n");
    assert_eq!(code(&hvlie(&["--config", bad.path().to_str().unwrap()])), 6);
    let unknown = config_file("command = \"classify\"\nwindow = 3\n");
    assert_eq!(code(&hvlie(&["--config", unknown.path().to_str().unwrap()])), 6);
}

#[test]
fn errors_go_to_stderr_and_report_to_stdout() {
    let o = hvlie(&["classify", "--case", "I", "--a", "1/x", "--b", "1"]);
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("malformed rational"));
    let o = hvlie(&["--format", "json", "classify", "--case", "IV"]);
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("elapsed "));
    assert!(!stdout(&o).contains("elapsed"));
}
