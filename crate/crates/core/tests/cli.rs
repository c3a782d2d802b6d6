//! End-to-end runs of the `crda` binary.

use std::process::{Command, Output};

fn crda(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crda"))
        .args(args)
        .output()
        .expect("spawn crda")
}

fn stdout_json(o: &Output) -> serde_json::Value {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("json on stdout")
}

#[test]
fn synthesis_report_for_two_qubits() {
    let v = stdout_json(&crda(&[
        "errors",
        "--which",
        "synthesis",
        "--model",
        "control",
        "--n",
        "2",
        "--g",
        "1",
    ]));
    let entries = v["report"]["entries"].as_array().unwrap();
    let closed = entries.iter().find(|e| e["name"] == "closed_form").unwrap();
    assert!((closed["value"].as_f64().unwrap() - 0.353553).abs() < 1e-6);
    let computed = entries.iter().find(|e| e["name"] == "delta_h_frobenius").unwrap();
    assert!((computed["value"].as_f64().unwrap() - 0.353553).abs() < 1e-6);
    assert_eq!(v["config"]["args"]["g"], 1.0);
}

#[test]
fn ising_simulation_csv_keeps_the_norm() {
    let o = crda(&[
        "simulate",
        "--model",
        "ising",
        "--n",
        "4",
        "--j",
        "1",
        "--tau",
        "0.3",
        "--blocks",
        "5",
        "--observable",
        "sz-total",
        "--out",
        "csv",
    ]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# config {"));
    assert_eq!(lines.next().unwrap(), "block,time,norm,sz-total");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 5);
    for r in rows {
        let norm: f64 = r.split(',').nth(2).unwrap().parse().unwrap();
        assert!((norm - 1.0).abs() < 1e-10);
    }
}

#[test]
fn h_even_has_three_terms() {
    let v = stdout_json(&crda(&["hamiltonian", "--kind", "h_even", "--n", "4", "--j", "1"]));
    assert_eq!(v["hamiltonian"]["terms"].as_array().unwrap().len(), 3);
    assert_eq!(v["hamiltonian"]["n"], 4);
}

#[test]
fn params_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("device.cfg");
    std::fs::write(&params, "n = 3\ng = 2\ndelta = 40\nratio = 0.001\nJ = 0.5\n").unwrap();
    let p = params.to_str().unwrap();
    let v = stdout_json(&crda(&[
        "--params",
        p,
        "errors",
        "--which",
        "synthesis",
        "--model",
        "control",
    ]));
    let closed = v["report"]["entries"][1]["value"].as_f64().unwrap();
    assert!((closed - 2.0 / (2.0 * 2f64.sqrt()) * 2f64.sqrt()).abs() < 1e-12);
    let v = stdout_json(&crda(&[
        "--params",
        p,
        "errors",
        "--which",
        "synthesis",
        "--model",
        "control",
        "--g",
        "1",
    ]));
    let closed = v["report"]["entries"][1]["value"].as_f64().unwrap();
    assert!((closed - 0.5).abs() < 1e-12);
    assert_eq!(v["config"]["global"]["params"]["g"], "2");

    let v = stdout_json(&crda(&["--params", p, "hamiltonian", "--kind", "h_zz"]));
    assert_eq!(v["config"]["resolved"]["J"], 0.5);
}

#[test]
fn json_parameter_files_with_arrays() {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("device.json");
    std::fs::write(
        &params,
        r#"{"n": 2, "driven": "odd", "omega_q": [101, 100], "omega": [100, 100], "Omega": [0.05, 0], "g": [0.02]}"#,
    )
    .unwrap();
    let v = stdout_json(&crda(&["--params", params.to_str().unwrap(), "verify-frames", "--rwa"]));
    let d = v["results"][0]["distance"].as_f64().unwrap();
    assert!(d > 1e-3 && d < 0.05, "{d}");
}

#[test]
fn output_file_and_format_from_extension() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("schedule.csv");
    let o = crda(&[
        "compile",
        "--model",
        "heisenberg",
        "--n",
        "4",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("index,step,gate,sites,duration,driven"));
    assert_eq!(text.lines().count(), 2 + 12);
}

#[test]
fn compiled_schedule_json_parses_back() {
    let v = stdout_json(&crda(&[
        "compile", "--model", "xy1d", "--n", "5", "--tau", "0.2", "--blocks", "3",
    ]));
    assert_eq!(v["structure"]["ok"], true);
    let s: crda::compiler::Schedule = serde_json::from_value(v["schedule"].clone()).unwrap();
    assert_eq!(s.repetitions, 3);
    assert_eq!(s.block.len(), 10);
}

#[test]
fn sweeps_emit_long_format_rows() {
    let o = crda(&[
        "errors",
        "--which",
        "dyson",
        "--n",
        "3",
        "--sweep",
        "t",
        "--range",
        "0.01:0.05",
        "--points",
        "4",
        "--format",
        "csv",
    ]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 4 * 3);
    let points: Vec<f64> = rows
        .iter()
        .map(|r| r.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert!(points.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn error_classes_have_distinct_exit_codes() {
    let usage = crda(&["simulate", "--model", "ising"]);
    assert_eq!(usage.status.code(), Some(2));
    let bad_flag = crda(&["errors", "--which", "nonsense"]);
    assert_eq!(bad_flag.status.code(), Some(2));
    let resource = crda(&[
        "errors", "--which", "trotter", "--model", "xy2d_da", "--nx", "6", "--ny", "6",
    ]);
    assert_eq!(resource.status.code(), Some(3));
    let dense = crda(&["simulate", "--model", "xy1d", "--n", "14", "--realistic"]);
    assert_eq!(dense.status.code(), Some(3));
    let v: serde_json::Value = serde_json::from_slice(&resource.stderr).unwrap();
    assert_eq!(v["error"], "resource");
}

#[test]
fn integrator_non_convergence_is_a_compute_error() {
    let dir = tempfile::tempdir().unwrap();
    let params = dir.path().join("device.cfg");
    std::fs::write(
        &params,
        "n = 2\ndriven = odd\ng = 0.02\ndelta = 1\nratio = 0.05\nmax_steps = 64\ntol = 1e-14\n",
    )
    .unwrap();
    let o = crda(&["--params", params.to_str().unwrap(), "verify-frames", "--rwa"]);
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn help_exits_cleanly() {
    let o = crda(&["--help"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    for cmd in ["hamiltonian", "verify-frames", "simulate", "errors", "compile"] {
        assert!(text.contains(cmd));
    }
}
