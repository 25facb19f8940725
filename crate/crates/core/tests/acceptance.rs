//! End-to-end acceptance gate. Every criterion runs exactly (no tolerance)
//! and prints one PASS/FAIL line; the test fails if any criterion fails.

use std::time::{Duration, Instant};

use hvlie::fock::{central_charges_from_vacuum, CentralCharges};
use hvlie::harness::{self, CheckResult, Command, RunConfig, DEFAULT_SEED};
use hvlie::Mutation;

struct Outcome {
    id: u32,
    title: &'static str,
    passed: bool,
    detail: String,
}

fn summarize(checks: &[CheckResult]) -> (bool, String) {
    let failed: Vec<String> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{} ({}; witness {})", c.name, c.detail, c.witness.clone().unwrap_or_default()))
        .collect();
    let total: usize = checks.iter().map(|c| c.checked).sum();
    if failed.is_empty() {
        (true, format!("{} checks, {total} instances", checks.len()))
    } else {
        (false, failed.join(" | "))
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn within(passed: bool, detail: String, elapsed: Duration, budget: Duration) -> (bool, String) {
    let detail = format!("{detail}; {:.2}s of {}s budget", elapsed.as_secs_f64(), budget.as_secs());
    (passed && elapsed < budget, detail)
}

fn lie_algebra() -> (bool, String) {
    let (checks, t) = timed(|| harness::algebra_suite(6, Mutation::None));
    let (ok, d) = summarize(&checks);
    within(ok, d, t, Duration::from_secs(5))
}

fn anomaly() -> (bool, String) {
    summarize(&harness::anomaly_suite())
}

fn commutator() -> (bool, String) {
    let (check, t) = timed(|| harness::commutator_suite(4, Mutation::None));
    let (ok, d) = summarize(&[check]);
    within(ok, d, t, Duration::from_secs(30))
}

fn representation() -> (bool, String) {
    let assigned = CentralCharges::assigned();
    let rep = harness::representation_suite(4, &assigned, "representation property");
    let oracle = central_charges_from_vacuum();
    let stated = harness::representation_suite(4, &CentralCharges::as_stated(), "stated triple");
    let (ok, mut d) = summarize(&[rep]);
    let expected = CentralCharges {
        c_l: hvlie::Scalar::from_int(2),
        c_i: hvlie::Scalar::one(),
        c_li: hvlie::Scalar::new(1, 2),
    };
    d.push_str(&format!("; oracle {oracle}"));
    if !stated.passed {
        d.push_str(&format!("; discrepancy flagged: stated {} is not a representation", CentralCharges::as_stated()));
    }
    (ok && oracle == expected && oracle == assigned && !stated.passed, d)
}

fn module_axioms() -> (bool, String) {
    let grid = harness::family_grid(DEFAULT_SEED);
    let mut checks = harness::families_suite(&grid, 12, 5, Mutation::None);
    checks.push(harness::decomposable_vir_check(12));
    summarize(&checks)
}

fn simplicity() -> (bool, String) {
    let mut cfg = RunConfig::new(Command::ScanSubmodules);
    cfg.window = Some(12);
    cfg.gen_bound = Some(3);
    match harness::run_command(&cfg) {
        Ok(r) => summarize(&r.checks),
        Err(e) => (false, e.to_string()),
    }
}

fn intertwiners() -> (bool, String) {
    match harness::intertwiner_suite(12, 5, DEFAULT_SEED) {
        Ok(checks) => summarize(&checks),
        Err(e) => (false, e.to_string()),
    }
}

fn classification() -> (bool, String) {
    let (cells, t) = timed(|| harness::classification_grid(DEFAULT_SEED, &[(8, 2), (12, 3)]));
    let (checks, _) = harness::classification_checks(&cells);
    let (ok, d) = summarize(&checks);
    within(ok, format!("{} cells; {d}", cells.len()), t, Duration::from_secs(60))
}

fn self_test() -> (bool, String) {
    summarize(&harness::self_test(DEFAULT_SEED))
}

#[test]
fn acceptance() {
    let criteria: [(u32, &str, fn() -> (bool, String)); 9] = [
        (1, "Lie algebra soundness", lie_algebra),
        (2, "anomaly closed forms", anomaly),
        (3, "f(m,n) commutator identity", commutator),
        (4, "Fock representation and central charges", representation),
        (5, "module axioms for all families", module_axioms),
        (6, "simplicity criterion vs submodule scan", simplicity),
        (7, "isomorphism witnesses", intertwiners),
        (8, "classification reproduction", classification),
        (9, "self-test falsifiability", self_test),
    ];
    let mut outcomes = Vec::new();
    println!();
    for (id, title, run) in criteria {
        let (passed, detail) = run();
        println!("[{id}] {:<4} {title}: {detail}", if passed { "PASS" } else { "FAIL" });
        outcomes.push(Outcome { id, title, passed, detail });
    }
    let failed: Vec<String> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| format!("[{}] {}: {}", o.id, o.title, o.detail))
        .collect();
    assert!(failed.is_empty(), "failed criteria:\n{}", failed.join("\n"));
}
