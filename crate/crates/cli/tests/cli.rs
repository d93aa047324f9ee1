use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hardycone"))
        .args(args)
        .env("HARDYCONE_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn tmp(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("hardycone-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn exponents_hemisphere_critical_case() {
    let out = run(&["exponents", "--N", "3", "--cap", "hemisphere", "--c", "2.25"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!((v["p_critical"].as_f64().unwrap() - 5.0).abs() < 1e-12);
    assert!((v["mu"].as_f64().unwrap() - 2.25).abs() < 1e-12);
}

#[test]
fn exponents_punctured_ball() {
    let out = run(&["exponents", "--N", "4", "--cap", "sphere", "--c", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert!((json(&out)["p_critical"].as_f64().unwrap() - 3.0).abs() < 1e-12);
}

#[test]
fn exponents_above_hardy_constant_exits_2() {
    let out = run(&["exponents", "--N", "3", "--cap", "hemisphere", "--c", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds the Hardy constant"));
}

#[test]
fn malformed_input_exits_64() {
    assert_eq!(run(&["exponents", "--N", "3", "--c", "abc"]).status.code(), Some(64));
    assert_eq!(run(&["exponents", "--N", "3", "--cap", "cone", "--c", "2"]).status.code(), Some(64));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn certify_prop32_pass_and_fail() {
    let pass = run(&["certify", "prop32", "--N", "3", "--c", "2.25", "--p", "4.5"]);
    assert_eq!(pass.status.code(), Some(0));
    assert_eq!(json(&pass)["verdict"], "pass");
    let fail = run(&["certify", "prop32", "--N", "3", "--c", "2.25", "--p", "5.0"]);
    assert_eq!(fail.status.code(), Some(1));
    let v = json(&fail);
    assert_eq!(v["analytic"]["pass"], false);
}

#[test]
fn certify_prop44_constant_weight() {
    let out = run(&["certify", "prop44", "--N", "5", "--k", "1", "--q", "const:1", "--p", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdict"], "pass");
}

#[test]
fn certify_flat_barrier_and_lemma43() {
    let out = run(&["certify", "flat-barrier", "--N", "4", "--c", "3", "--a", "-1", "--K", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["ratios"].as_array().unwrap().len(), 50);
    let out = run(&["certify", "lemma43", "--N", "5", "--q", "dip:1:2"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn certify_missing_parameter_is_usage_error() {
    assert_eq!(run(&["certify", "prop32", "--N", "3", "--c", "2.25"]).status.code(), Some(64));
}

#[test]
fn eigen_curve_through_hemisphere_value() {
    let csv = tmp("curve.csv");
    let svg = tmp("curve.svg");
    let out = run(&[
        "eigen-curve",
        "--N",
        "3",
        "--count",
        "5",
        "--out",
        csv.to_str().unwrap(),
        "--plot",
        svg.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let rows: Vec<(f64, f64)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let (a, b) = l.split_once(',').unwrap();
            (a.parse().unwrap(), b.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 5);
    assert!(rows.windows(2).all(|w| w[1].1 < w[0].1));
    let mid = rows[2];
    assert!((mid.0 - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
    assert!((mid.1 - 2.0).abs() < 1e-6);
    let plot = std::fs::read_to_string(&svg).unwrap();
    assert!(plot.starts_with("<svg") && plot.contains("hemisphere"));
}

#[test]
fn eigen_curve_single_point() {
    let out = run(&["eigen-curve", "--N", "4", "--theta-min", "1", "--theta-max", "1", "--count", "1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 2);
}

#[test]
fn sweep_is_deterministic_and_matches_point_commands() {
    let cfg = tmp("sweep.toml");
    std::fs::write(
        &cfg,
        "N = 3\n[c]\nmin = 2.2\nmax = 2.25\ncount = 2\n[p]\nmin = 4.0\nmax = 5.5\ncount = 4\n",
    )
    .unwrap();
    let a = tmp("a.csv");
    let b = tmp("b.csv");
    let plot = tmp("a.svg");
    let cfg_s = cfg.to_str().unwrap();
    let first = run(&["sweep", "--config", cfg_s, "--out", a.to_str().unwrap(), "--plot", plot.to_str().unwrap()]);
    assert_eq!(first.status.code(), Some(0), "{}", String::from_utf8_lossy(&first.stderr));
    let second = run(&["sweep", "--config", cfg_s, "--threads", "1", "--out", b.to_str().unwrap()]);
    assert_eq!(second.status.code(), Some(0));
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# config_sha256="));
    assert_eq!(
        lines.next().unwrap(),
        "c,p,lambda1,mu,alpha_minus,p_critical,cert_analytic,cert_numeric,zeta0_verdict,max_residual"
    );
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 8);
    assert!(std::fs::read_to_string(&plot).unwrap().contains("<polyline"));

    // the (2.25, 5.5) cell against the single-shot commands
    let row = rows.iter().find(|r| r[0].parse::<f64>().unwrap() == 2.25 && r[1].parse::<f64>().unwrap() == 5.5).unwrap();
    let ex = json(&run(&["exponents", "--N", "3", "--c", "2.25"]));
    assert_eq!(row[5].parse::<f64>().unwrap(), ex["p_critical"].as_f64().unwrap());
    let cert = json(&run(&["certify", "prop32", "--N", "3", "--c", "2.25", "--p", "5.5"]));
    assert_eq!(row[6], if cert["analytic"]["pass"] == true { "pass" } else { "fail" });
    assert_eq!(row[9].parse::<f64>().unwrap(), cert["max_relative_mismatch"].as_f64().unwrap());
}

#[test]
fn sweep_overrides_and_io_failure() {
    let out = run(&[
        "sweep", "--N", "3", "--c-min", "2.25", "--c-max", "2.25", "--c-count", "1", "--p-min", "4", "--p-max", "4",
        "--p-count", "1", "--no-zeta0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().nth(2).unwrap().contains("skipped(disabled)"));
    let bad = run(&[
        "sweep", "--N", "3", "--c-min", "2.25", "--c-max", "2.25", "--c-count", "1", "--p-min", "4", "--p-max", "4",
        "--p-count", "1", "--out", "/nonexistent-dir/x.csv",
    ]);
    assert_eq!(bad.status.code(), Some(74));
    let missing = run(&["sweep", "--config", "/nonexistent-dir/cfg.toml"]);
    assert_eq!(missing.status.code(), Some(74));
}

#[test]
fn hardy_check_tables() {
    let out = run(&["hardy-check", "--N", "3", "--cap", "sphere", "--shells", "4,6,8", "--per-decade", "512", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let rows = v["rows"].as_array().unwrap();
    let last = rows.last().unwrap()["extrapolated"].as_f64().unwrap();
    assert!((last - 0.25).abs() < 5e-3);
    let out = run(&["hardy-check", "--N", "3", "--shells", "4,8", "--per-decade", "512"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("mu = 2.25"));
    let out = run(&["hardy-check", "--N", "3", "--weight", "improved", "--shells", "4,8", "--per-decade", "512"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("positivity margin"));
}
