//! End-to-end tests of the `afc` binary: JSON output, CSV round-trips,
//! deterministic reruns, and exit codes.

use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use afc_core::efficiency::{efficiency, optimal_square_efficiency, optimal_square_width};
use afc_core::{MemoryParams, ToothShape};

fn afc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_afc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_field(stdout: &[u8], key: &str) -> f64 {
    let text = String::from_utf8_lossy(stdout);
    let value: serde_json::Value = serde_json::from_str(text.trim()).expect("valid JSON");
    value[key]
        .as_f64()
        .unwrap_or_else(|| panic!("field {key} in {text}"))
}

#[test]
fn eval_matches_closed_form_optimum() {
    let p = optimal_square_width(10.0).unwrap();
    let out = afc(&[
        "eval",
        "--od",
        "10",
        "--shape",
        "square",
        "--half-width-pT",
        &p.to_string(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let eta = json_field(&out.stdout, "eta");
    let expected = optimal_square_efficiency(10.0).unwrap();
    assert!((eta - expected).abs() < 1e-10, "eta {eta} vs {expected}");
}

#[test]
fn tabulated_csv_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tooth.csv");

    // Triangle tooth of half-width 1 and height 8.
    let knots = vec![(-PI, 0.0), (-1.0, 0.0), (0.0, 8.0), (1.0, 0.0), (PI, 0.0)];
    let mut csv = String::from("omega_rad_per_s,absorption_per_m\n");
    for &(w, v) in &knots {
        csv.push_str(&format!("{w:e},{v:e}\n"));
    }
    std::fs::write(&path, csv).unwrap();

    let out = afc(&[
        "eval",
        "--od",
        "10",
        "--shape",
        "tabulated",
        "--file",
        path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let eta = json_field(&out.stdout, "eta");

    let params = MemoryParams::new(1.0, 1.0, 10.0, 0.0, 0.0).unwrap();
    let expected = efficiency(&ToothShape::Tabulated { knots }, &params)
        .unwrap()
        .eta;
    assert!(
        (eta - expected).abs() < 1e-12 * expected.max(1e-12),
        "eta {eta} vs {expected}"
    );
}

#[test]
fn exported_shape_reproduces_efficiency() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gauss.csv");
    let run = afc(&[
        "eval",
        "--od",
        "10",
        "--shape",
        "gaussian",
        "--fwhm-pT",
        "0.5",
        "--export-shape",
        path.to_str().unwrap(),
        "--export-samples",
        "4096",
    ]);
    assert!(run.status.success());
    let eta_direct = json_field(&run.stdout, "eta");

    let reread = afc(&[
        "eval",
        "--od",
        "10",
        "--shape",
        "tabulated",
        "--file",
        path.to_str().unwrap(),
    ]);
    assert!(reread.status.success());
    let eta_tab = json_field(&reread.stdout, "eta");
    // Dense piecewise-linear resampling of a smooth tooth.
    assert!(
        (eta_direct - eta_tab).abs() < 1e-5,
        "{eta_direct} vs {eta_tab}"
    );
}

fn run_to_file(dir: &Path, name: &str, args: &[&str]) -> Vec<u8> {
    let path = dir.join(name);
    let mut full: Vec<&str> = args.to_vec();
    let path_str = path.to_str().unwrap().to_owned();
    full.push("--out");
    full.push(&path_str);
    let out = afc(&full);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    std::fs::read(&path).unwrap()
}

#[test]
fn verify_and_simulate_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let verify_args = [
        "verify",
        "--check",
        "dominance",
        "--seeds",
        "5",
        "--seed",
        "7",
        "--n-knots",
        "16",
    ];
    let a = run_to_file(dir.path(), "v1.jsonl", &verify_args);
    let b = run_to_file(dir.path(), "v2.jsonl", &verify_args);
    assert!(!a.is_empty());
    assert_eq!(a, b, "verify output differs between identical runs");

    let sim_args = [
        "simulate",
        "--od",
        "4",
        "--shape",
        "square",
        "--half-width-pT",
        "0.6",
        "--n-omega",
        "1024",
        "--n-time",
        "512",
    ];
    let a = run_to_file(dir.path(), "s1.json", &sim_args);
    let b = run_to_file(dir.path(), "s2.json", &sim_args);
    assert!(!a.is_empty());
    assert_eq!(a, b, "simulate output differs between identical runs");
}

#[test]
fn exit_codes() {
    // Success.
    let ok = afc(&["optimize", "--shape", "square", "--od", "10"]);
    assert_eq!(ok.status.code(), Some(0));

    // Config errors: missing tabulated file, malformed CSV header.
    let missing = afc(&["eval", "--od", "10", "--shape", "tabulated"]);
    assert_eq!(missing.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "wrong,header\n0,1\n").unwrap();
    let malformed = afc(&[
        "eval",
        "--od",
        "10",
        "--shape",
        "tabulated",
        "--file",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(malformed.status.code(), Some(2));

    // Invalid physical parameters.
    let neg = afc(&[
        "eval",
        "--od",
        "-3",
        "--shape",
        "square",
        "--half-width-pT",
        "0.5",
    ]);
    assert_eq!(neg.status.code(), Some(2));
}
