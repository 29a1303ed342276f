use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn epw(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_epw"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("spawn epw")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn generation_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = epw(dir.path(), &["gen-lagrangian", "--seed", "0", "--prime", "7"]);
    let b = epw(dir.path(), &["gen-lagrangian", "--seed", "0", "--prime", "7"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(a.stdout.starts_with(b"epw-lag 1\nfield prime:7\nprovenance seed:0\n"));
    let c = epw(dir.path(), &["gen-lagrangian", "--seed", "1", "--prime", "7"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn stratify_counts_cover_projective_space() {
    let dir = tempfile::tempdir().unwrap();
    assert!(epw(dir.path(), &["gen-lagrangian", "--prime", "3", "--out", "a.lag"])
        .status
        .success());
    let r = json(&epw(dir.path(), &["stratify", "--instance", "a.lag", "--prime", "3"]));
    let total: u64 = r["result"]["counts"]
        .as_object()
        .unwrap()
        .values()
        .map(|v| v.as_u64().unwrap())
        .sum();
    assert_eq!(total, 364);
    assert_eq!(r["result"]["total"], "364");
    assert_eq!(r["config"]["seed"], 0);
    assert_eq!(r["result"]["exhaustive"], true);
}

#[test]
fn threefold_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(epw(d, &["gen-lagrangian", "--prime", "5", "--out", "a.lag"])
        .status
        .success());
    let csv = epw(
        d,
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
    let text = String::from_utf8(csv.stdout).unwrap();
    let phi = text
        .lines()
        .skip(1)
        .find_map(|l| l.strip_suffix(",2"))
        .expect("a hyperplane of dual stratum 2")
        .to_string();
    assert!(
        epw(d, &["build-gm", "--instance", "a.lag", "--v5", &phi, "--out", "g.gm"])
            .status
            .success()
    );

    let c = json(&epw(d, &["classify-fibers", "--gm", "g.gm", "--table", "threefold"]));
    assert_eq!(c["result"]["consistent"], true);
    assert_eq!(c["result"]["points"], 781);

    let s = json(&epw(d, &["splitting-section", "--gm", "g.gm"]));
    let sections = s["result"]["sections"].as_array().unwrap();
    assert!(!sections.is_empty());
    assert!(sections
        .iter()
        .all(|x| x["dim"] == 5 && x["isotropic"] == true && x["contains_l0"] == true));

    let cy = json(&epw(
        d,
        &["cycle-check", "--gm", "g.gm", "--points", "3", "--seed", "3"],
    ));
    assert_eq!(cy["result"]["passed"], cy["result"]["checked"]);
    assert_eq!(cy["config"]["seed"], 3);

    let f = json(&epw(d, &["double-cover-fiber", "--gm", "g.gm", "--points", "4"]));
    for fib in f["result"]["fibers"].as_array().unwrap() {
        let m: u64 = fib["multiplicities"]
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_u64().unwrap())
            .sum();
        assert_eq!(m, 2);
    }

    let base: Vec<String> = s["result"]["base_point"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.to_string())
        .collect();
    let lt = json(&epw(
        d,
        &[
            "line-transform",
            "--instance",
            "a.lag",
            "--v1",
            &base.join(","),
            "--v5",
            &phi,
        ],
    ));
    assert_eq!(lt["result"]["involution"], true);
    assert_eq!(lt["result"]["double_annihilator"], true);
}

#[test]
fn errors_carry_a_replay_line() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert!(epw(d, &["gen-lagrangian", "--prime", "3", "--out", "a.lag"])
        .status
        .success());
    let out = epw(d, &["sextic-line", "--instance", "a.lag", "--seed", "4"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "unsupported-field");
    assert_eq!(err["error"]["replay"], "epw sextic-line --instance a.lag --seed 4");

    std::fs::write(d.join("bad.lag"), "epw-lag 9\nfield prime:3\n").unwrap();
    let out = epw(d, &["stratify", "--instance", "bad.lag"]);
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "parse");

    let out = epw(d, &["stratify", "--instance", "a.lag", "--prime", "5"]);
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "invalid-input");

    let out = epw(d, &["stratify", "--instance", "missing.lag"]);
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "io");
}

#[test]
fn timing_is_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let plain = json(&epw(dir.path(), &["hilbert", "--hyperplanes", "11"]));
    assert!(plain.get("timing").is_none());
    let timed = json(&epw(dir.path(), &["--timing", "hilbert", "--hyperplanes", "11"]));
    assert!(timed["timing"]["elapsed_ms"].is_u64());
    assert_eq!(plain["result"], timed["result"]);
}
