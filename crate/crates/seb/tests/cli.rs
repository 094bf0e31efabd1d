//! End-to-end checks of the command line: exit codes, JSON report shape,
//! trace files, generator determinism, and the bench file outputs.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn seb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seb"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn json(out: &Output) -> Value {
    serde_json::from_str(&stdout(out)).expect("JSON report on stdout")
}

fn write_points(dir: &Path, name: &str, csv: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, csv).unwrap();
    p
}

const ACUTE: &str = "1,0\n3,0\n2,2\n";
const OBTUSE: &str = "1,0\n5,0\n3,1\n";
const QUAD: &str =
    "0.441234,0.375473\n-0.405275,0.405980\n-0.499223,0.333663\n0.470587,-0.422787\n";

#[test]
fn gen_is_deterministic_and_in_range() {
    let a = seb(&["gen", "--dim", "3", "--count", "5", "--seed", "42"]);
    let b = seb(&["gen", "--dim", "3", "--count", "5", "--seed", "42"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout, "same seed, same bytes");
    let text = stdout(&a);
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 5);
    for row in rows {
        let vals: Vec<f64> = row.split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(vals.len(), 3);
        for v in vals {
            assert!((0.0..1.0).contains(&v), "coordinate {} out of range", v);
        }
    }
    let c = seb(&["gen", "--dim", "3", "--count", "5", "--seed", "43"]);
    assert_ne!(a.stdout, c.stdout, "different seed, different cloud");
}

#[test]
fn gen_rejects_zero_dimension() {
    let out = seb(&["gen", "--dim", "0", "--count", "3"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn solve_recurrence_reports_converged_ball() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_points(dir.path(), "acute.csv", ACUTE);
    let out = seb(&["solve", "-i", input.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let rep = json(&out);
    assert_eq!(rep["method"], "recurrence");
    assert_eq!(rep["stop_reason"], "converged");
    let lam: Vec<f64> = rep["lambda"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    for (got, want) in lam.iter().zip([0.3125, 0.3125, 0.375]) {
        assert!((got - want).abs() <= 1e-9, "lambda {} vs {}", got, want);
    }
    assert!((rep["center"][0].as_f64().unwrap() - 2.0).abs() <= 1e-9);
    assert!((rep["center"][1].as_f64().unwrap() - 0.75).abs() <= 1e-9);
    assert!((rep["radius"].as_f64().unwrap() - 1.25).abs() <= 1e-9);
    assert!((rep["eta2"].as_f64().unwrap() - 0.906483968322).abs() <= 1e-9);
    assert!(rep["support"].is_null());
    assert!(rep["dropped"].is_null());
    assert!(rep["iterations"].as_u64().unwrap() > 0);
    assert_eq!(rep["augmented"], false);
    assert!(rep["wall_time_s"].as_f64().unwrap() >= 0.0);
}

#[test]
fn solve_welzl_reports_support_and_exact_stop() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_points(dir.path(), "obtuse.csv", OBTUSE);
    let out = seb(&["solve", "-i", input.to_str().unwrap(), "-m", "welzl"]);
    assert_eq!(code(&out), 0);
    let rep = json(&out);
    assert_eq!(rep["method"], "welzl");
    assert_eq!(rep["stop_reason"], "exact");
    assert!(rep["eta2"].is_null());
    assert!(rep["kappa"].is_null());
    let support: Vec<u64> = rep["support"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap())
        .collect();
    assert_eq!(support, vec![0, 1]);
    let lam: Vec<f64> = rep["lambda"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_f64().unwrap())
        .collect();
    for (got, want) in lam.iter().zip([0.5, 0.5, 0.0]) {
        assert!((got - want).abs() <= 1e-9);
    }
    assert!((rep["radius"].as_f64().unwrap() - 2.0).abs() <= 1e-9);
}

#[test]
fn solve_equidistant_fails_structurally_on_dependent_points() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_points(dir.path(), "quad.csv", QUAD);
    let out = seb(&["solve", "-i", input.to_str().unwrap(), "-m", "equidistant"]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn unknown_method_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_points(dir.path(), "acute.csv", ACUTE);
    let out = seb(&["solve", "-i", input.to_str().unwrap(), "-m", "simplex"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("simplex"));
}

#[test]
fn missing_input_is_a_usage_error() {
    let out = seb(&["solve", "-i", "/nonexistent/points.csv"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn exhausted_iteration_budget_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_points(dir.path(), "acute.csv", ACUTE);
    let out = seb(&["solve", "-i", input.to_str().unwrap(), "--max-iter", "3"]);
    assert_eq!(code(&out), 2);
    let rep = json(&out);
    assert_eq!(rep["stop_reason"], "max_iter");
    assert_eq!(rep["iterations"].as_u64().unwrap(), 3);
}

#[test]
fn trace_rows_follow_the_declared_schema() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_points(dir.path(), "obtuse.csv", OBTUSE);
    let trace = dir.path().join("trace.csv");
    let out = seb(&[
        "solve",
        "-i",
        input.to_str().unwrap(),
        "-m",
        "heuristic",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(&trace).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "iter,residual_inf,j_value,radius,lambda_min"
    );
    let mut rows = 0;
    let mut prev_iter = -1i64;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields.len(), 5, "row {:?}", line);
        let iter: i64 = fields[0].parse().unwrap();
        assert!(iter >= prev_iter, "iterations go backwards at {:?}", line);
        prev_iter = iter;
        for f in &fields[1..] {
            let v: f64 = f.parse().unwrap();
            assert!(v.is_finite());
        }
        rows += 1;
    }
    // initial row, the drop at step 9, and the converged tail
    assert!(rows > 10, "only {} trace rows", rows);
}

#[test]
fn trace_with_a_direct_method_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_points(dir.path(), "acute.csv", ACUTE);
    let trace = dir.path().join("trace.csv");
    let out = seb(&[
        "solve",
        "-i",
        input.to_str().unwrap(),
        "-m",
        "welzl",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 1);
    assert!(!trace.exists(), "no trace file for direct methods");
}

#[test]
fn analyze_reports_frozen_spectra() {
    let dir = tempfile::tempdir().unwrap();

    let obtuse = write_points(dir.path(), "obtuse.csv", OBTUSE);
    let out = seb(&["analyze", "-i", obtuse.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let rep = json(&out);
    let eta2 = rep["eta2"].as_f64().unwrap();
    assert!((eta2 - 0.980486568594).abs() <= 1e-9, "eta2 = {}", eta2);
    let kappa = rep["kappa"].as_f64().unwrap();
    let expect = 1.0 / (1.0 / eta2).ln();
    assert!((kappa - expect).abs() <= 1e-9 * expect, "kappa = {}", kappa);
    assert_eq!(rep["rank_condition"], true);
    assert_eq!(rep["augmented"], false);
    assert_eq!(rep["n"].as_u64().unwrap(), 3);
    assert_eq!(rep["dim"].as_u64().unwrap(), 2);

    // isosceles triangle with apex spread p = 0.6: det W has the closed
    // form (4/27)(1 - p)(1 + p)^3
    let iso = write_points(dir.path(), "iso.csv", "-1,0\n0.6,0.8\n0.6,-0.8\n");
    let out = seb(&["analyze", "-i", iso.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let rep = json(&out);
    let det_w = rep["det_w"].as_f64().unwrap();
    let formula = (4.0 / 27.0) * 0.4 * 1.6f64.powi(3);
    assert!((det_w - formula).abs() <= 1e-6, "det W = {}", det_w);
}

#[test]
fn bench_writes_csvs_deterministic_up_to_timing() {
    let dir = tempfile::tempdir().unwrap();
    let cases = dir.path().join("cases.txt");
    fs::write(&cases, "# tiny smoke case\n2,6,3,11\n").unwrap();

    let run = |out_dir: &Path| {
        let out = Command::new(env!("CARGO_BIN_EXE_seb"))
            .args([
                "bench",
                "--cases",
                cases.to_str().unwrap(),
                "--methods",
                "welzl,heuristic",
                "--out-dir",
                out_dir.to_str().unwrap(),
            ])
            .env("SEB_THREADS", "1")
            .output()
            .expect("binary runs");
        assert_eq!(code(&out), 0, "stderr: {}", String::from_utf8_lossy(&out.stderr));
        assert!(stdout(&out).contains("case 1"));
    };
    let d1 = dir.path().join("run1");
    let d2 = dir.path().join("run2");
    run(&d1);
    run(&d2);

    // strip the timing column, everything else must reproduce exactly
    let strip = |path: &Path, col: usize| -> Vec<String> {
        fs::read_to_string(path)
            .unwrap()
            .lines()
            .map(|line| {
                let mut fields: Vec<&str> = line.split(',').collect();
                fields.remove(col);
                fields.join(",")
            })
            .collect()
    };
    let i1 = strip(&d1.join("instances.csv"), 5);
    let i2 = strip(&d2.join("instances.csv"), 5);
    assert_eq!(i1, i2);
    assert_eq!(i1.len(), 1 + 2 * 3, "header plus methods x instances");
    assert_eq!(
        i1[0],
        "case_id,d,n,seed,method,rel_radius_err,center_err,iterations,drops"
    );
    let a1 = strip(&d1.join("aggregate.csv"), 6);
    let a2 = strip(&d2.join("aggregate.csv"), 6);
    assert_eq!(a1, a2);
    assert_eq!(a1.len(), 1 + 2);

    // the exact solver scored against itself is error-free
    for line in fs::read_to_string(d1.join("instances.csv")).unwrap().lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        if fields[4] == "welzl" {
            assert_eq!(fields[6].parse::<f64>().unwrap(), 0.0);
            assert_eq!(fields[7].parse::<f64>().unwrap(), 0.0);
        }
    }
}

#[test]
fn cli_report_round_trips_the_library_solution_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_points(dir.path(), "quad.csv", QUAD);
    let out = seb(&[
        "solve",
        "-i",
        input.to_str().unwrap(),
        "-m",
        "welzl",
        "--seed",
        "7",
    ]);
    assert_eq!(code(&out), 0);
    let rep = json(&out);

    let points = seb::io::load_points(QUAD.as_bytes(), false).unwrap();
    let sol = seb::welzl::solve(&points, 7).unwrap();

    // floats are printed with 17 significant digits, so the JSON must
    // reproduce the solution bit for bit
    for (i, v) in sol.weights.vector().iter().enumerate() {
        assert_eq!(rep["lambda"][i].as_f64().unwrap(), *v, "lambda[{}]", i);
    }
    for (i, v) in sol.ball.center.iter().enumerate() {
        assert_eq!(rep["center"][i].as_f64().unwrap(), *v, "center[{}]", i);
    }
    assert_eq!(rep["radius"].as_f64().unwrap(), sol.ball.radius);
    let support: Vec<usize> = rep["support"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_u64().unwrap() as usize)
        .collect();
    assert_eq!(support, sol.support);
}
