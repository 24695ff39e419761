//! End-to-end checks of the command-line interface.

use std::process::{Command, Output};

use serde_json::Value;

fn carpet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_carpet"))
        .args(args)
        .output()
        .expect("carpet binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn help_exits_zero() {
    let out = carpet(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in [
        "chamanara",
        "quotient",
        "toral",
        "hyperlocal",
        "entropy",
        "invlim",
        "verify",
        "plot",
    ] {
        assert!(text.contains(sub), "help lists {sub}");
    }
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(carpet(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(
        carpet(&["chamanara", "--base", "1", "--check-semiconj"]).status.code(),
        Some(2)
    );
    assert_eq!(carpet(&["chamanara", "--orbit", "3/2,0"]).status.code(), Some(2));
    assert_eq!(carpet(&["toral", "--matrix", "1,0,0,1"]).status.code(), Some(2));
    assert_eq!(carpet(&["hyperlocal", "--lambda", "x"]).status.code(), Some(2));
}

#[test]
fn semiconjugacy_check_passes() {
    let out = carpet(&["chamanara", "--base", "2", "--check-semiconj", "--period-max", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["semiconjugacy"]["failures"], 0);
    assert!(v["semiconjugacy"]["cases"].as_u64().unwrap() > 0);
}

#[test]
fn entropy_realization_reports_vector() {
    let out = carpet(&["entropy", "--realize", "2.5", "--tol", "1e-9"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let n = v["N"].as_u64().unwrap();
    assert_eq!(v["P"].as_array().unwrap().len() as u64, n);
    assert!((v["achieved"].as_f64().unwrap() - 2.5).abs() <= 1e-9);
}

#[test]
fn baker_orbit_is_exact() {
    let out = carpet(&["chamanara", "--base", "2", "--orbit", "1/3,1/5", "--steps", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let orbit = v["orbit"].as_array().unwrap();
    assert_eq!(orbit.len(), 3);
    assert_eq!(orbit[1]["x"], "2/3");
    assert_eq!(orbit[1]["y"], "1/10");
    assert_eq!(orbit[2]["x"], "1/3");
}

#[test]
fn toral_periodic_listing() {
    let out = carpet(&["toral", "--periodic", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let total: usize = v["periodic"]["orbits"]
        .as_array()
        .unwrap()
        .iter()
        .map(|o| o["points"].as_array().unwrap().len())
        .sum();
    assert_eq!(total, 25);
}

#[test]
fn invlim_spec_falsifier_finds_no_survivors() {
    let out = carpet(&[
        "invlim",
        "--depth",
        "3",
        "--blow",
        "fixed",
        "--spec-falsify",
        "--resolution",
        "12",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["spec_falsify"]["survivors"], 0);
    assert!(v["spec_falsify"]["label"].as_str().unwrap().contains("not a proof"));
}

#[test]
fn out_file_matches_stdout() {
    let dir = std::env::temp_dir().join(format!("carpet-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let args = ["toral", "--orbit", "1/5,2/5", "--steps", "3"];
    let direct = carpet(&args);
    let mut with_out = vec!["--out", path.to_str().unwrap()];
    with_out.extend(args);
    assert_eq!(carpet(&with_out).status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn plots_are_deterministic_svg() {
    let cases: [&[&str]; 3] = [
        &["plot", "--kind", "regions", "--lambda", "2", "--eps", "0.1"],
        &["plot", "--kind", "identification", "--base", "3"],
        &["plot", "--kind", "quotient", "--base", "2"],
    ];
    for args in cases {
        let a = carpet(args);
        let b = carpet(args);
        assert_eq!(a.status.code(), Some(0), "{args:?}");
        assert_eq!(a.stdout, b.stdout);
        let text = String::from_utf8(a.stdout).unwrap();
        assert!(text.starts_with("<svg") && text.trim_end().ends_with("</svg>"));
    }
}

#[test]
fn empty_orbit_plot_has_axes_only() {
    let out = carpet(&["plot", "--kind", "orbit"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("<line"));
    assert!(!text.contains("<circle"));
}

#[test]
fn thread_count_is_validated() {
    let bad = Command::new(env!("CARGO_BIN_EXE_carpet"))
        .env("CARPET_THREADS", "zero")
        .args(["toral"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let good = Command::new(env!("CARGO_BIN_EXE_carpet"))
        .env("CARPET_THREADS", "2")
        .args(["toral"])
        .output()
        .unwrap();
    assert_eq!(good.status.code(), Some(0));
}

#[test]
fn single_criterion_verify() {
    let out = carpet(&["verify", "--criterion", "3", "--criterion", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let ids: Vec<u64> = v["criteria"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["id"].as_u64().unwrap())
        .collect();
    assert_eq!(ids, vec![3, 5]);
}
