//! End-to-end tests of the `kerrsim` binary: exit codes, output schemas,
//! and byte-level determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn binary() -> &'static str {
    env!("CARGO_BIN_EXE_kerrsim")
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(binary()).args(args).output().unwrap()
}

fn tempdir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("kerrsim-cli-{tag}-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

const BASIC: &str = r#"{
    "dimension": 8,
    "chi": 0.3,
    "gamma": 0.2,
    "times": [0.0, 0.5, 1.0],
    "solvers": ["kraus"],
    "initial_state": {"type": "coherent", "alpha": 1.0}
}"#;

#[test]
fn evolve_writes_csv_with_stable_schema() {
    let dir = tempdir("evolve");
    let cfg = write_config(&dir, "run.json", BASIC);
    let out_path = dir.join("records.csv");
    let output = run(&[
        "evolve",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{output:?}");
    let text = fs::read_to_string(&out_path).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,solver,trace_re,trace_im,purity,mean_n,fidelity_vs_ref,min_eig,p0,p1,p2,p3,p4,p5,p6,p7"
    );
    assert_eq!(lines.count(), 3);
    // every numeric field parses back
    for line in text.lines().skip(1) {
        for (i, field) in line.split(',').enumerate() {
            if i == 1 {
                assert_eq!(field, "kraus");
            } else {
                field.parse::<f64>().unwrap();
            }
        }
    }
}

#[test]
fn evolve_is_byte_identical_across_runs() {
    let dir = tempdir("determinism");
    let cfg = write_config(&dir, "run.json", BASIC);
    let out_a = dir.join("a.csv");
    let out_b = dir.join("b.csv");
    for (out, _) in [(&out_a, 0), (&out_b, 1)] {
        let output = run(&[
            "evolve",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(output.status.success());
    }
    assert_eq!(fs::read(&out_a).unwrap(), fs::read(&out_b).unwrap());
}

#[test]
fn evolve_json_payload_has_expected_keys() {
    let dir = tempdir("json");
    let text = BASIC.replace(
        "\"solvers\": [\"kraus\"],",
        "\"solvers\": [\"kraus\"], \"format\": \"json\", \"dump_density_matrices\": true, \
         \"qgrid\": {\"re_min\": -3.0, \"re_max\": 3.0, \"im_min\": -3.0, \"im_max\": 3.0, \"resolution\": 11},",
    );
    let cfg = write_config(&dir, "run.json", &text);
    let output = run(&["evolve", "--config", cfg.to_str().unwrap()]);
    assert!(output.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert!(doc.get("config").is_some());
    let records = doc["records"].as_array().unwrap();
    assert_eq!(records.len(), 3);
    assert_eq!(records[0]["solver"], "kraus");
    assert!(records[0]["photon_dist"].as_array().unwrap().len() == 8);
    let dumps = doc["density_matrices"].as_array().unwrap();
    assert_eq!(dumps.len(), 3);
    // row-major interleaved re/im: 2 * 8 * 8 numbers
    assert_eq!(dumps[0]["data"].as_array().unwrap().len(), 128);
    let qgrid = &doc["qgrid"];
    assert_eq!(qgrid["resolution"], 11);
    assert_eq!(qgrid["values"].as_array().unwrap().len(), 121);
}

#[test]
fn evolve_vacuum_limit_row_hits_unit_fidelity() {
    let dir = tempdir("vacuum");
    let text = r#"{
        "dimension": 12,
        "chi": 0.1,
        "gamma": 1.0,
        "times": [0.0, 10.0],
        "initial_state": {"type": "coherent", "alpha": 1.0},
        "fidelity_reference": {"type": "fock", "n": 0}
    }"#;
    let cfg = write_config(&dir, "run.json", text);
    let output = run(&["evolve", "--config", cfg.to_str().unwrap()]);
    assert!(output.status.success());
    let stdout = String::from_utf8(output.stdout).unwrap();
    let last = stdout.lines().last().unwrap();
    let fidelity: f64 = last.split(',').nth(6).unwrap().parse().unwrap();
    assert!(fidelity >= 1.0 - 1e-6, "fidelity {fidelity}");
}

#[test]
fn compare_passes_on_well_resolved_problem() {
    let dir = tempdir("compare-ok");
    let text = BASIC.replace(
        "\"solvers\": [\"kraus\"],",
        "\"solvers\": [\"kraus\", \"rk4\", \"liouville\"], \"rk4_steps_per_unit_time\": 2000,",
    );
    let cfg = write_config(&dir, "run.json", &text);
    let output = run(&["compare", "--config", cfg.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("compare: PASS"));
}

#[test]
fn compare_fails_with_coarse_integrator() {
    let dir = tempdir("compare-coarse");
    let text = BASIC.replace(
        "\"solvers\": [\"kraus\"],",
        "\"solvers\": [\"kraus\", \"rk4\"], \"rk4_steps_per_unit_time\": 10,",
    );
    let cfg = write_config(&dir, "run.json", &text);
    let output = run(&["compare", "--config", cfg.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(1), "{output:?}");
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("compare: FAIL"));
}

#[test]
fn compare_with_single_solver_is_usage_error() {
    let dir = tempdir("compare-usage");
    let cfg = write_config(&dir, "run.json", BASIC);
    let output = run(&["compare", "--config", cfg.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2), "{output:?}");
}

#[test]
fn validate_passes_and_prints_per_check_lines() {
    let dir = tempdir("validate");
    let text = BASIC.replace("\"dimension\": 8", "\"dimension\": 10");
    let cfg = write_config(&dir, "run.json", &text);
    let output = run(&["validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let stdout = String::from_utf8(output.stdout).unwrap();
    for name in [
        "completeness_residual",
        "trace_preservation",
        "hermiticity",
        "positivity",
        "amplitude_damping_reduction",
        "fock_invariance",
        "kerr_purity_preservation",
        "kerr_revival",
        "vacuum_limit",
    ] {
        assert!(stdout.contains(name), "missing check line {name}");
    }
    assert!(stdout.contains("validate: PASS"));
}

#[test]
fn kraus_check_reports_defects_and_reconstruction() {
    let dir = tempdir("krauscheck");
    let text = r#"{
        "dimension": 8,
        "chi": 1.0,
        "gamma": 1.0,
        "times": [1.0],
        "initial_state": {"type": "coherent", "alpha": 0.8}
    }"#;
    let cfg = write_config(&dir, "run.json", text);
    let term_table = dir.join("terms.csv");
    let output = run(&[
        "kraus-check",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        term_table.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("kraus-check: PASS"));
    let table = fs::read_to_string(&term_table).unwrap();
    assert!(table.starts_with("t,m,n,l,conjugacy_defect"));
    // at least one strongly non-conjugate term in the table
    let strong = table
        .lines()
        .skip(1)
        .filter(|line| {
            line.split(',')
                .next_back()
                .and_then(|v| v.parse::<f64>().ok())
                .is_some_and(|d| d > 1e-3)
        })
        .count();
    assert!(strong > 0);
}

#[test]
fn config_errors_exit_with_code_two() {
    let dir = tempdir("config-error");
    // malformed json
    let bad = write_config(&dir, "bad.json", "{ not json");
    let output = run(&["evolve", "--config", bad.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    // invalid field value
    let negative = write_config(&dir, "neg.json", &BASIC.replace("\"gamma\": 0.2", "\"gamma\": -1.0"));
    let output = run(&["evolve", "--config", negative.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8(output.stderr).unwrap();
    assert!(stderr.contains("gamma"), "stderr: {stderr}");
    // missing file
    let output = run(&["evolve", "--config", dir.join("missing.json").to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    // unknown subcommand (clap usage error)
    let output = run(&["frobnicate"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn format_override_must_stay_consistent() {
    let dir = tempdir("format-override");
    let text = BASIC.replace(
        "\"solvers\": [\"kraus\"],",
        "\"solvers\": [\"kraus\"], \"format\": \"json\", \"dump_density_matrices\": true,",
    );
    let cfg = write_config(&dir, "run.json", &text);
    // forcing csv clashes with the density-matrix dump
    let output = run(&[
        "evolve",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(output.status.code(), Some(2), "{output:?}");
}
