use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn phasemu(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phasemu"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write_json(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, v.to_string()).unwrap();
    path
}

fn real_matrix(rows: &[&[f64]]) -> Value {
    let m: Vec<Vec<[f64; 2]>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| [x, 0.0]).collect())
        .collect();
    json!({"dim": rows.len(), "matrix": m})
}

fn final_c(o: &Output) -> f64 {
    stdout(o)
        .lines()
        .find_map(|l| l.strip_prefix("final c = "))
        .expect("summary line")
        .trim()
        .parse()
        .unwrap()
}

#[test]
fn equal_angles_give_exactly_minus_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.csv");
    let o = phasemu(&["epr", "run", "--theta1", "0", "--theta2", "0", "--n", "1000", "--seed", "7", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(final_c(&o), -1.0);
    let csv = std::fs::read_to_string(out).unwrap();
    let mut lines = csv.lines();
    let meta: Value = serde_json::from_str(lines.next().unwrap().strip_prefix("# ").unwrap()).unwrap();
    assert_eq!(meta["theta1_deg"], 0.0);
    assert_eq!(meta["scheme"], "counter_hash");
    assert_eq!(meta["n"], 1000);
    assert_eq!(lines.next(), Some("step,a,b,c"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 1000);
    for row in rows {
        let f: Vec<&str> = row.split(',').collect();
        assert!(f[1] == "0.5" && f[2] == "-0.5" || f[1] == "-0.5" && f[2] == "0.5", "{row}");
    }
}

#[test]
fn ten_degrees_converges() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.json");
    let o = phasemu(&["epr", "run", "--theta1", "0", "--theta2", "10", "--n", "20000", "--seed", "7", "--format", "json", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!((final_c(&o) + 10f64.to_radians().cos()).abs() <= 0.01);
    let trace: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(trace["samples"].as_array().unwrap().len(), 20000);
    assert_eq!(trace["metadata"]["theta2_rad"], 10f64.to_radians());
}

#[test]
fn identical_flags_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    for format in ["csv", "json"] {
        let files: Vec<Vec<u8>> = ["a", "b"]
            .iter()
            .map(|name| {
                let out = dir.path().join(format!("{name}.{format}"));
                let o = phasemu(&["epr", "run", "--theta1", "15", "--theta2", "-40", "--n", "3000", "--seed", "3", "--scheme", "sine_fold", "--format", format, "--out", out.to_str().unwrap()]);
                assert!(o.status.success());
                std::fs::read(out).unwrap()
            })
            .collect();
        assert_eq!(files[0], files[1]);
    }
}

#[test]
fn trace_to_stdout_without_out() {
    let o = phasemu(&["epr", "run", "--theta1", "0", "--theta2", "90", "--n", "5", "--seed", "1"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 7);
    assert!(String::from_utf8_lossy(&o.stderr).contains("final c = "));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["epr", "run", "--theta1", "nan", "--theta2", "0"][..],
        &["epr", "run", "--theta1", "0", "--theta2", "inf"],
        &["epr", "run", "--theta1", "0", "--theta2", "0", "--n", "0"],
        &["epr", "run", "--theta2", "0"],
        &["epr", "sweep", "--n", "100"],
        &["rng", "test", "--n", "10"],
        &["rng", "test", "--alpha", "2"],
        &["bogus"],
    ] {
        assert_eq!(phasemu(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn sweep_table_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("sweep.json");
    let n = 50_000;
    let o = phasemu(&["epr", "sweep", "--deltas", "180,90,0", "--n", &n.to_string(), "--seed", "5", "--json", json_path.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 4);
    let rows: Value = serde_json::from_str(&std::fs::read_to_string(json_path).unwrap()).unwrap();
    let rows = rows.as_array().unwrap();
    let deltas: Vec<f64> = rows.iter().map(|r| r["delta_deg"].as_f64().unwrap()).collect();
    assert_eq!(deltas, [180.0, 90.0, 0.0]);
    let ticks: Vec<i64> = rows.iter().map(|r| r["start_tick"].as_i64().unwrap()).collect();
    assert_eq!(ticks, [0, n, 2 * n]);
    assert!((rows[0]["c"].as_f64().unwrap() - 1.0).abs() <= 1e-12);
    assert!(rows[1]["c"].as_f64().unwrap().abs() <= 4.0 / (n as f64).sqrt() + 0.005);
    assert_eq!(rows[2]["c"].as_f64().unwrap(), -1.0);
}

#[test]
fn rng_test_reports() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("report.json");
    let o = phasemu(&["rng", "test", "--scheme", "counter_hash", "--n", "100000", "--seed", "3", "--json", json_path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("kolmogorov_smirnov"));
    let report: Value = serde_json::from_str(&std::fs::read_to_string(json_path).unwrap()).unwrap();
    assert_eq!(report["results"].as_array().unwrap().len(), 5);
    assert_eq!(report["n"], 100000);

    let o = phasemu(&["rng", "test", "--scheme", "constant", "--n", "20000"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL"));
}

#[test]
fn measure_eigenvector_gives_its_eigenvalue() {
    let dir = tempfile::tempdir().unwrap();
    let state = write_json(dir.path(), "state.json", &json!({"dim": 3, "amplitudes": [[0, 0], [0, 1], [0, 0]]}));
    let obs = write_json(dir.path(), "obs.json", &real_matrix(&[&[1.0, 0.0, 0.0], &[0.0, 2.5, 0.0], &[0.0, 0.0, -1.0]]));
    let out = dir.path().join("collapsed.json");
    let o = phasemu(&["measure", "--state", state.to_str().unwrap(), "--observable", obs.to_str().unwrap(), "--seed", "4", "--tick", "17", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("outcome = (2.5)"), "{text}");
    assert!(text.contains("probability = 1"), "{text}");
    let collapsed: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(collapsed["birth_tick"], 17);
    assert_eq!(collapsed["dim"], 3);
}

#[test]
fn measure_singlet_is_anticorrelated() {
    let dir = tempfile::tempdir().unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let state = write_json(dir.path(), "singlet.json", &json!({"dim": 4, "amplitudes": [[0, 0], [h, 0], [-h, 0], [0, 0]]}));
    // s_x ⊗ 1 and 1 ⊗ s_x.
    let a = write_json(dir.path(), "a.json", &real_matrix(&[
        &[0.0, 0.0, 0.5, 0.0], &[0.0, 0.0, 0.0, 0.5], &[0.5, 0.0, 0.0, 0.0], &[0.0, 0.5, 0.0, 0.0],
    ]));
    let b = write_json(dir.path(), "b.json", &real_matrix(&[
        &[0.0, 0.5, 0.0, 0.0], &[0.5, 0.0, 0.0, 0.0], &[0.0, 0.0, 0.0, 0.5], &[0.0, 0.0, 0.5, 0.0],
    ]));
    for tick in 0..20 {
        let o = phasemu(&["measure", "--state", state.to_str().unwrap(), "--observable", a.to_str().unwrap(), "--observable", b.to_str().unwrap(), "--seed", "1", "--tick", &tick.to_string(), "--rebirth"]);
        assert!(o.status.success());
        let text = stdout(&o);
        let line = text.lines().next().unwrap();
        assert!(line == "outcome = (-0.5, 0.5)" || line == "outcome = (0.5, -0.5)", "{line}");
        assert!(text.contains("probability = 0.5"), "{text}");
    }
}

#[test]
fn measure_reports_model_and_file_errors() {
    let dir = tempfile::tempdir().unwrap();
    let state = write_json(dir.path(), "state.json", &json!({"dim": 2, "amplitudes": [[1, 0], [0, 0]]}));
    let sx = write_json(dir.path(), "sx.json", &real_matrix(&[&[0.0, 1.0], &[1.0, 0.0]]));
    let sy = write_json(dir.path(), "sy.json", &json!({"dim": 2, "matrix": [[[0, 0], [0, -1]], [[0, 1], [0, 0]]]}));
    let big = write_json(dir.path(), "big.json", &real_matrix(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 2.0]]));
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"dim\": 2, \"matrix\": ").unwrap();
    let not_hermitian = write_json(dir.path(), "nh.json", &real_matrix(&[&[0.0, 1.0], &[0.0, 0.0]]));
    let missing = dir.path().join("missing.json");
    let run = |obs: &[&Path]| {
        let mut args = vec!["measure", "--state", state.to_str().unwrap()];
        for o in obs {
            args.push("--observable");
            args.push(o.to_str().unwrap());
        }
        phasemu(&args).status.code()
    };
    assert_eq!(run(&[&sx]), Some(0));
    assert_eq!(run(&[&sx, &sy]), Some(3));
    assert_eq!(run(&[&big]), Some(3));
    assert_eq!(run(&[&bad]), Some(4));
    assert_eq!(run(&[&not_hermitian]), Some(4));
    assert_eq!(run(&[&missing]), Some(4));
    assert_eq!(run(&[]), Some(2));
}
