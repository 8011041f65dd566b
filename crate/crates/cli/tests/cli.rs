use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ere-stability"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn multipliers(v: &Value) -> Vec<(f64, f64)> {
    v["multipliers"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| (p[0].as_f64().unwrap(), p[1].as_f64().unwrap()))
        .collect()
}

#[test]
fn nonconvex_endpoint_is_unstable_with_a_real_pair() {
    let v = json_of(&run(&["analyze", "--case", "nonconvex", "--beta", "6.75", "--ecc", "0"]));
    assert_eq!(v["verdict"], "unstable");
    assert_eq!(v["schema"], "1");
    // Circular exponents iν solve s² + (λ₃+λ₄−4)s + λ₃λ₄ = 0 with s = ν²;
    // the negative root −α₁ gives the real pair e^{±2π√α₁}.
    let (l3, l4): (f64, f64) = (6.75, -1.5);
    let b = l3 + l4 - 4.0;
    let alpha1 = (b + (b * b - 4.0 * l3 * l4).sqrt()) / 2.0;
    let expected = (2.0 * std::f64::consts::PI * alpha1.sqrt()).exp();
    let real: Vec<f64> = multipliers(&v)
        .into_iter()
        .filter(|(_, im)| im.abs() < 1e-9)
        .map(|(re, _)| re)
        .filter(|re| (re.abs() - 1.0).abs() > 1e-3)
        .collect();
    assert_eq!(real.len(), 2, "{real:?}");
    let big = real.iter().cloned().fold(0.0, f64::max);
    assert!((big / expected - 1.0).abs() < 1e-6, "{big} vs {expected}");
    assert!((real[0] * real[1] - 1.0).abs() < 1e-4);
}

#[test]
fn convex_small_parameter_is_strongly_stable() {
    let v = json_of(&run(&["analyze", "--case", "convex", "--beta", "0.1", "--ecc", "0"]));
    assert_eq!(v["verdict"], "strongly-stable");
    for m in v["moduli"].as_array().unwrap() {
        assert!((m.as_f64().unwrap() - 1.0).abs() < 1e-7);
    }
    assert_eq!(v["stabilized"], true);
}

#[test]
fn convex_large_parameter_is_hyperbolic() {
    let v = json_of(&run(&["analyze", "--case", "convex", "--beta", "6.0", "--ecc", "0.3"]));
    assert_eq!(v["verdict"], "hyperbolic");
}

#[test]
fn generic_omega_entry_is_reported() {
    let v = json_of(&run(&[
        "analyze", "--case", "custom", "--lambda3", "1", "--lambda4", "0.5", "--ecc", "0.2", "--omega", "0.6,0.8",
    ]));
    assert_eq!(v["omega"]["omega"][1].as_f64(), Some(0.8));
    assert!(v["omega"]["i_omega"].is_u64());
}

#[test]
fn usage_errors_exit_with_two() {
    for args in [
        vec!["analyze", "--case", "convex", "--beta", "9", "--ecc", "0"],
        vec!["analyze", "--case", "convex", "--beta", "0.1", "--ecc", "1.2"],
        vec!["analyze", "--case", "custom", "--ecc", "0"],
        vec!["analyze", "--case", "mystery", "--beta", "1", "--ecc", "0"],
        vec!["analyze", "--case", "custom", "--lambda3", "1", "--lambda4", "1", "--ecc", "0", "--omega", "2"],
        vec!["figure", "3", "--out", "x.csv"],
        vec!["cc-limit", "--m", "1.5", "--tau", "1", "--branch", "convex"],
        vec!["reduce", "--masses", "1,1,1,1", "--positions", "1,0;2,0;3,0;4,0"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn output_numbers_carry_at_most_fifteen_digits() {
    let out = run(&["analyze", "--case", "lagrange", "--beta", "1", "--ecc", "0.4"]);
    let text = String::from_utf8(out.stdout).unwrap();
    for token in text.split(|c: char| !(c.is_ascii_digit() || c == '.' || c == 'e' || c == '-')) {
        let mantissa = token.split('e').next().unwrap();
        let digits = mantissa.trim_start_matches('-').replace('.', "");
        let significant = digits.trim_start_matches('0');
        assert!(significant.len() <= 15, "{token}");
    }
}

#[test]
fn cc_limit_converges_to_the_limit_table() {
    let v = json_of(&run(&["cc-limit", "--m", "0.5", "--tau", "1", "--branch", "convex"]));
    assert_eq!(v["limit"]["beta2_0"].as_f64(), Some(0.75));
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    let last = rows.last().unwrap()["params"]["beta2"].as_f64().unwrap();
    assert!((last - 0.75).abs() < 1e-3);
    let b12: Vec<f64> = rows.iter().map(|r| r["abs_beta12"].as_f64().unwrap()).collect();
    assert!(b12.windows(2).all(|w| w[1] < w[0]), "{b12:?}");
    assert_eq!(v["monotone"], true);
}

#[test]
fn reduce_reports_square_parameters() {
    let v = json_of(&run(&["reduce", "--masses", "1,1,1,1", "--positions", "1,0;0,1;-1,0;0,-1"]));
    assert!(v["cc_residual"].as_f64().unwrap() < 1e-12);
    assert!(v["unitarity_defect"].as_f64().unwrap() < 1e-12);
    assert_eq!(v["beta1"].as_f64(), Some(0.0));
}

#[test]
fn figure_one_writes_csv_and_svg_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let svg = dir.path().join("a.svg");
    let grid = "0:0.1:0.5";
    let out = run(&["figure", "1", "--out", a.to_str().unwrap(), "--svg", svg.to_str().unwrap(), "--e-grid", grid]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&["figure", "1", "--out", b.to_str().unwrap(), "--e-grid", grid]);
    assert!(out.status.success());
    let csv = fs::read_to_string(&a).unwrap();
    assert_eq!(csv, fs::read_to_string(&b).unwrap());
    assert!(csv.starts_with("case,omega,label,e,beta,nu,bracket\n"));
    let gamma1: Vec<f64> = csv
        .lines()
        .filter(|l| l.contains(",Γ1,"))
        .map(|l| l.split(',').nth(4).unwrap().parse().unwrap())
        .collect();
    assert_eq!(gamma1.len(), 6);
    assert!(gamma1.iter().all(|b| b.abs() < 1e-9), "{gamma1:?}");
    assert!(fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}

#[test]
fn figure_two_has_three_boundaries_and_regions() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("f2.json");
    let regions = dir.path().join("r2.csv");
    let out = run(&[
        "figure", "2", "--out", csv.to_str().unwrap(), "--format", "json", "--regions", regions.to_str().unwrap(),
        "--e-grid", "0,0.2,0.4",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let fig: Value = serde_json::from_str(&fs::read_to_string(&csv).unwrap()).unwrap();
    let labels: Vec<&str> = fig["curves"].as_array().unwrap().iter().map(|c| c["label"].as_str().unwrap()).collect();
    for l in ["Γl", "Γm", "Γr"] {
        assert!(labels.contains(&l), "{labels:?}");
    }
    let map = fs::read_to_string(&regions).unwrap();
    for r in [",I\n", ",II\n", ",IV\n"] {
        assert!(map.contains(r), "region {r:?} missing");
    }
}

#[test]
fn config_file_supplies_flags_and_command_line_wins() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# point run\ncommand = analyze\ncase = convex\nbeta = 6.0\necc = 0.3\n").unwrap();
    let v = json_of(&run(&["--config", cfg.to_str().unwrap()]));
    assert_eq!(v["verdict"], "hyperbolic");
    let v = json_of(&run(&["--config", cfg.to_str().unwrap(), "analyze", "--beta", "0.1", "--ecc", "0"]));
    assert_eq!(v["verdict"], "strongly-stable");
    assert_eq!(v["parameter"].as_f64(), Some(0.1));
}

#[test]
fn thread_count_comes_from_the_environment() {
    let out = bin()
        .env("ERE_STABILITY_THREADS", "2")
        .args(["analyze", "--case", "convex", "--beta", "0.1", "--ecc", "0"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let out = bin()
        .env("ERE_STABILITY_THREADS", "zero")
        .args(["analyze", "--case", "convex", "--beta", "0.1", "--ecc", "0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
