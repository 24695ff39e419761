//! Acceptance battery: one PASS/FAIL line per criterion.
//!
//! Runs `carpet verify --all --seed 42` twice.  Criteria 1 to 10 are judged
//! from the first report and its per-criterion timings; criterion 11 compares
//! the two reports byte for byte.

use std::collections::BTreeMap;
use std::process::{Command, ExitCode};

use serde_json::Value;

/// Runtime limits in seconds, where one applies.
const LIMITS: [(u64, f64); 3] = [(1, 300.0), (6, 600.0), (10, 900.0)];

struct Run {
    stdout: Vec<u8>,
    timings: BTreeMap<u64, f64>,
    status: Option<i32>,
}

fn run_verify() -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_carpet"))
        .args(["verify", "--all", "--seed", "42"])
        .output()
        .expect("carpet binary runs");
    // stderr lines look like "criterion  3 fiber structure   PASS 0.1s"
    let mut timings = BTreeMap::new();
    for line in String::from_utf8_lossy(&out.stderr).lines() {
        let mut words = line.split_whitespace();
        if words.next() != Some("criterion") {
            continue;
        }
        let id = words.next().and_then(|w| w.parse().ok());
        let secs = line
            .split_whitespace()
            .last()
            .and_then(|w| w.strip_suffix('s'))
            .and_then(|w| w.parse().ok());
        if let (Some(id), Some(secs)) = (id, secs) {
            timings.insert(id, secs);
        }
    }
    Run {
        stdout: out.stdout,
        timings,
        status: out.status.code(),
    }
}

fn main() -> ExitCode {
    let first = run_verify();
    let second = run_verify();
    let report: Value = match serde_json::from_slice(&first.stdout) {
        Ok(v) => v,
        Err(e) => {
            println!("acceptance: report is not JSON ({e}); exit status {:?}", first.status);
            return ExitCode::FAILURE;
        }
    };
    let mut all = true;
    let empty = Vec::new();
    let criteria = report["criteria"].as_array().unwrap_or(&empty);
    for id in 1..=10u64 {
        let c = criteria.iter().find(|c| c["id"].as_u64() == Some(id));
        let name = c.and_then(|c| c["name"].as_str()).unwrap_or("missing");
        let mut ok = c.and_then(|c| c["passed"].as_bool()).unwrap_or(false);
        let secs = first.timings.get(&id).copied();
        let mut note = format!("{:.1}s", secs.unwrap_or(f64::NAN));
        if let Some(&(_, limit)) = LIMITS.iter().find(|(i, _)| *i == id) {
            let within = secs.is_some_and(|s| s <= limit);
            ok &= within;
            note.push_str(&format!(" (limit {limit:.0}s)"));
        }
        all &= ok;
        println!(
            "criterion {id:>2} {name:<28} {} {note}",
            if ok { "PASS" } else { "FAIL" }
        );
    }
    let same = first.stdout == second.stdout && !first.stdout.is_empty();
    let status_ok = first.status == Some(0) && second.status == Some(0);
    all &= same && status_ok;
    println!(
        "criterion 11 {:<28} {} ({} bytes, exit codes {:?}/{:?})",
        "determinism",
        if same && status_ok { "PASS" } else { "FAIL" },
        first.stdout.len(),
        first.status,
        second.status
    );
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
