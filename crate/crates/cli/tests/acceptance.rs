//! The numbered acceptance criteria at full size. Prints one PASS/FAIL line per
//! criterion and fails if any criterion fails or exceeds its budget.

use std::io::Write;
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use epw_core::verify::{run_criterion, Context, CriterionResult, VerifyParams};

const SEED: u64 = 0;

/// Wall-clock budgets in seconds, criteria 1 to 11.
const BUDGETS: [u64; 11] = [30, 120, 20, 10, 60, 30, 30, 20, 60, 10, 180];

/// Full-size parameters; each value is the one the criterion states.
fn params() -> VerifyParams {
    let p = VerifyParams::full(SEED);
    assert_eq!((p.sextic_prime, p.sextic_instances, p.lines_per_instance), (13, 20, 5));
    assert_eq!((p.strata_prime, p.strata_instances), (11, 10));
    assert_eq!((p.kernel_samples, p.linear_samples, p.z_fibers), (200, 100, 10));
    assert_eq!((p.table_prime, p.cover_points, p.boundary_min), (5, 50, 10));
    assert_eq!(p.property_cases, 100);
    p
}

/// Standard output, standard error and exit code of one run.
fn epw(dir: &Path, jobs: usize, args: &[&str]) -> (String, String, Option<i32>) {
    let out = Command::new(env!("CARGO_BIN_EXE_epw"))
        .current_dir(dir)
        .arg("--jobs")
        .arg(jobs.to_string())
        .args(args)
        .output()
        .expect("spawn epw");
    let text = |b: Vec<u8>| String::from_utf8(b).expect("utf-8 output");
    (text(out.stdout), text(out.stderr), out.status.code())
}

/// Runs every command twice, on one and on four threads, and returns the
/// commands whose output differs.
fn determinism() -> (usize, Vec<String>) {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    epw(d, 1, &["gen-lagrangian", "--prime", "5", "--out", "a.lag"]);
    epw(
        d,
        1,
        &["gen-lagrangian", "--prime", "11", "--seed", "2", "--out", "b.lag"],
    );
    let (csv, _, _) = epw(
        d,
        1,
        &[
            "dual-stratify",
            "--instance",
            "a.lag",
            "--keep-all-from",
            "2",
            "--format",
            "csv",
        ],
    );
    let phi = csv
        .lines()
        .skip(1)
        .find_map(|l| l.strip_suffix(",2"))
        .expect("dual stratum 2")
        .to_string();
    epw(
        d,
        1,
        &["build-gm", "--instance", "a.lag", "--v5", &phi, "--out", "g.gm"],
    );
    let (split, _, _) = epw(d, 1, &["splitting-section", "--gm", "g.gm"]);
    let v: serde_json::Value = serde_json::from_str(&split).unwrap();
    let base: Vec<String> = v["result"]["base_point"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.to_string())
        .collect();
    let base = base.join(",");
    let commands: Vec<Vec<&str>> = vec![
        vec!["gen-lagrangian", "--prime", "7", "--seed", "5", "--ndv"],
        vec!["stratify", "--instance", "a.lag"],
        vec![
            "stratify",
            "--instance",
            "a.lag",
            "--format",
            "csv",
            "--keep-all-from",
            "1",
        ],
        vec!["dual-stratify", "--instance", "a.lag"],
        vec!["sextic-line", "--instance", "b.lag", "--seed", "9"],
        vec!["build-gm", "--instance", "a.lag", "--v5", &phi],
        vec!["classify-fibers", "--gm", "g.gm", "--format", "csv"],
        vec!["double-cover-fiber", "--gm", "g.gm", "--points", "5"],
        vec!["splitting-section", "--gm", "g.gm"],
        vec!["cycle-check", "--gm", "g.gm", "--points", "3", "--seed", "1"],
        vec!["line-transform", "--instance", "a.lag", "--v1", &base, "--v5", &phi],
        vec!["hilbert", "--hyperplanes", "11"],
        vec!["verify", "--level", "quick", "--criterion", "10"],
        vec!["sextic-line", "--instance", "a.lag"],
    ];
    let mut differing = Vec::new();
    for c in &commands {
        if epw(d, 1, c) != epw(d, 4, c) {
            differing.push(c.join(" "));
        }
    }
    (commands.len(), differing)
}

/// Writes straight to the process stdout so the lines show without `--nocapture`.
fn report(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
    let _ = out.flush();
}

fn line(r: &CriterionResult, budget: Duration, passed: bool) -> String {
    format!(
        "{} criterion {:>2} {:<26} {:>7.2}s / {:>3}s  {}",
        if passed { "PASS" } else { "FAIL" },
        r.id,
        r.name,
        r.elapsed.as_secs_f64(),
        budget.as_secs(),
        r.detail
    )
}

#[test]
fn acceptance_criteria() {
    let ctx = Context::new(params());
    let pre = run_criterion(&ctx, 0);
    assert!(pre.passed, "symplectic preflight: {}", pre.detail);
    // the GM fixtures are shared by several criteria and built outside their budgets
    let start = Instant::now();
    let three = ctx.threefold().expect("threefold fixture");
    let five = ctx.fivefold().expect("fivefold fixture");
    report(&format!(
        "setup: threefold seed {} and fivefold seed {} over F_{} in {:.2}s",
        three.seed,
        five.seed,
        ctx.params.gm_prime,
        start.elapsed().as_secs_f64()
    ));
    let mut failures = Vec::new();
    for id in 1..=11u8 {
        let budget = Duration::from_secs(BUDGETS[id as usize - 1]);
        let start = Instant::now();
        let mut r = run_criterion(&ctx, id);
        if id == 11 {
            let (n, differing) = determinism();
            if differing.is_empty() {
                r.detail = format!("{}; {n} commands byte-identical under --jobs 1 and 4", r.detail);
            } else {
                r.passed = false;
                r.detail = format!("{}; output depends on --jobs: {}", r.detail, differing.join(" | "));
            }
            r.elapsed = start.elapsed();
        }
        let passed = r.passed && r.elapsed < budget;
        report(&line(&r, budget, passed));
        if !passed {
            failures.push(format!("{} ({}) replay: {}", r.id, r.name, r.replay));
        }
    }
    assert!(failures.is_empty(), "failed criteria: {failures:?}");
}
