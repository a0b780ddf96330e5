//! End-to-end tests of the `infogeo` binary: documented output values,
//! CSV/JSON formats, determinism and exit codes.

use serde_json::Value;
use std::io::Write;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_infogeo"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_output(args: &[&str]) -> Value {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

fn first_distance(v: &Value) -> f64 {
    v["pairs"][0]["distance"].as_f64().expect("distance field")
}

#[test]
fn dist_exponential_matches_closed_form() {
    let v = json_output(&["dist", "--family", "exponential", "--a", "0.1", "--b", "2"]);
    assert!((first_distance(&v) - 20.0f64.ln()).abs() < 1e-12);
}

#[test]
fn dist_normal_legacy_halfplane() {
    let v = json_output(&[
        "dist",
        "--family",
        "normal",
        "--a",
        "1,1",
        "--b",
        "4,1",
        "--legacy-halfplane",
    ]);
    assert!((first_distance(&v) - 2.38952643457422).abs() < 1e-9);
}

#[test]
fn dist_identical_points_is_zero() {
    let v = json_output(&["dist", "--family", "gamma", "--a", "2,3", "--b", "2,3"]);
    assert_eq!(first_distance(&v), 0.0);
}

#[test]
fn dist_euclidean_flag_gives_coordinate_distance() {
    let v = json_output(&[
        "dist",
        "--family",
        "beta",
        "--euclidean",
        "--a",
        "1,10",
        "--b",
        "10,1",
    ]);
    assert!((first_distance(&v) - 162.0f64.sqrt()).abs() < 1e-12);
}

#[test]
fn dist_points_file_emits_all_pairs() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "1\n2\n4").unwrap();
    let v = json_output(&[
        "dist",
        "--family",
        "poisson",
        "--points",
        file.path().to_str().unwrap(),
    ]);
    let pairs = v["pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 3);
    // Poisson distance 2|sqrt(a) - sqrt(b)|
    let expect = |a: f64, b: f64| 2.0 * (a.sqrt() - b.sqrt()).abs();
    assert!((pairs[0]["distance"].as_f64().unwrap() - expect(1.0, 2.0)).abs() < 1e-12);
    assert!((pairs[2]["distance"].as_f64().unwrap() - expect(2.0, 4.0)).abs() < 1e-12);
}

#[test]
fn geodesic_binomial_midpoint_and_speed() {
    let out = run(&[
        "geodesic", "--family", "binomial", "--n", "5", "--a", "0.4", "--b", "0.7",
        "--samples", "100",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 101);
    // endpoints equal the inputs
    assert!((rows[0][1] - 0.4).abs() < 1e-9);
    assert!((rows[100][1] - 0.7).abs() < 1e-9);
    // midpoint from the arclength-coordinate closed form
    assert!((rows[50][1] - 0.5524430967504949).abs() < 1e-6);
    // constant speed column
    let s0 = rows[0][2];
    for row in &rows {
        assert!((row[2] - s0).abs() < 1e-4 * s0, "speed {} vs {s0}", row[2]);
    }
}

#[test]
fn geodesic_sphere_mode_emits_rays() {
    let out = run(&[
        "geodesic", "--family", "normal", "--a", "0,1", "--sphere", "1", "--rays", "8",
        "--samples", "10",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows[0], "ray,t,x1,x2,speed");
    assert_eq!(rows.len(), 1 + 8 * 11);
    // every ray starts at the center and travels at unit speed
    for ray in 0..8 {
        let fields: Vec<f64> =
            rows[1 + ray * 11].split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(fields[0] as usize, ray);
        assert!((fields[2] - 0.0).abs() < 1e-12 && (fields[3] - 1.0).abs() < 1e-12);
        assert!((fields[4] - 1.0).abs() < 1e-6);
    }
}

#[test]
fn curvature_gamma_and_metric_normal() {
    let v = json_output(&["curvature", "--family", "gamma", "--point", "1,2"]);
    assert!((v["sectional_curvature"].as_f64().unwrap() + 0.45630369144018).abs() < 1e-8);
    let v = json_output(&["metric", "--family", "normal", "--point", "1,1"]);
    let g = v["metric"].as_array().unwrap();
    assert!((g[0][0].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((g[0][1].as_f64().unwrap()).abs() < 1e-12);
    assert!((g[1][1].as_f64().unwrap() - 2.0).abs() < 1e-12);
}

#[test]
fn pdf_uniform_beta_is_one() {
    let v = json_output(&["pdf", "--family", "beta", "--point", "1,1", "--at", "0.3"]);
    assert!((v["values"][0]["pdf"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn sample_is_deterministic_per_seed() {
    let args =
        ["sample", "--family", "normal", "--point", "0,1", "--samples", "5", "--seed", "42"];
    let a = json_output(&args);
    let b = json_output(&args);
    assert_eq!(a, b);
    let other = json_output(&[
        "sample", "--family", "normal", "--point", "0,1", "--samples", "5", "--seed", "43",
    ]);
    assert_ne!(a["samples"], other["samples"]);
}

#[test]
fn kmeans_k_equals_n_gives_singletons() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    writeln!(file, "0.5,2.5\n0.6,3.0\n3.0,0.6\n2.5,0.5").unwrap();
    let v = json_output(&[
        "kmeans",
        "--family",
        "beta",
        "--points",
        file.path().to_str().unwrap(),
        "--k",
        "4",
        "--seed",
        "1",
    ]);
    let mut seen: Vec<i64> =
        v["assignments"].as_array().unwrap().iter().map(|a| a.as_i64().unwrap()).collect();
    seen.sort_unstable();
    assert_eq!(seen, vec![0, 1, 2, 3]);
    assert!(v["objective"].as_f64().unwrap() < 1e-12);
}

#[test]
fn knn_train_equals_test_agrees_fully() {
    let mut train = tempfile::NamedTempFile::new().unwrap();
    writeln!(train, "x1,x2,label\n0.5,2.5,0\n0.6,3.0,0\n3.0,0.6,1\n2.5,0.5,1").unwrap();
    let mut test = tempfile::NamedTempFile::new().unwrap();
    writeln!(test, "0.5,2.5\n0.6,3.0\n3.0,0.6\n2.5,0.5").unwrap();
    for flag in [&["--euclidean"][..], &[][..]] {
        let mut args = vec![
            "knn",
            "--family",
            "beta",
            "--train",
            train.path().to_str().unwrap(),
            "--test",
            test.path().to_str().unwrap(),
            "--k",
            "1",
        ];
        args.extend_from_slice(flag);
        let v = json_output(&args);
        let pred: Vec<i64> =
            v["predictions"].as_array().unwrap().iter().map(|p| p.as_i64().unwrap()).collect();
        assert_eq!(pred, vec![0, 0, 1, 1]);
    }
}

#[test]
fn exit_code_2_on_malformed_input() {
    // unknown family
    let out = run(&["dist", "--family", "nosuch", "--a", "1", "--b", "2"]);
    assert_eq!(out.status.code(), Some(2));
    // point outside the domain
    let out = run(&["dist", "--family", "bernoulli", "--a", "0.5", "--b", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
    // wrong coordinate count
    let out = run(&["metric", "--family", "normal", "--point", "1,1,1"]);
    assert_eq!(out.status.code(), Some(2));
    // stdout stays clean on errors
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
}

#[test]
fn exit_code_3_on_solver_failure_with_pair_in_message() {
    let out = run(&["dist", "--family", "beta", "--a", "1,1", "--b", "1e8,1"]);
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("pair (0, 1)"), "stderr: {stderr}");
}
