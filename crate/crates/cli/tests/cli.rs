//! End-to-end runs of the `dissim` binary: output contracts, byte-level
//! reproducibility, and exit codes.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dissim"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("dissim-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &Path, name: &str, value: serde_json::Value) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(&value).unwrap()).unwrap();
    path
}

fn run_ok(cmd: &mut Command) -> Output {
    let out = cmd.output().unwrap();
    assert!(
        out.status.success(),
        "command failed: {}\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn simulate_writes_one_transcript_per_seed_plus_summary() {
    let dir = scratch("fanout");
    let seeds: Vec<u64> = (1..=20).collect();
    let cfg = write_config(
        &dir,
        "cfg.json",
        serde_json::json!({
            "generator": {"family": "karmed", "means": [0.9, 0.4], "f_grid_resolution": 2},
            "learner": "ls",
            "alpha": 0.75,
            "t": 10,
            "seeds": seeds,
            "noise": "two_point"
        }),
    );
    let out = dir.join("out");
    run_ok(bin().args([
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--threads",
        "4",
    ]));
    for seed in 1..=20 {
        assert!(out.join(format!("transcript_{seed}.csv")).exists());
    }
    assert!(out.join("summary.json").exists());
    assert!(out.join("plot.csv").exists());
}

#[test]
fn simulate_outputs_are_byte_identical_across_runs() {
    let dir = scratch("repro");
    let cfg = write_config(
        &dir,
        "cfg.json",
        serde_json::json!({
            "generator": {"family": "sphere", "n": 2, "resolution": 12, "target_index": 3},
            "learner": "optimistic",
            "alpha": "unknown",
            "t": 40,
            "seeds": [7, 8],
            "noise": "two_point"
        }),
    );
    let out_a = dir.join("a");
    let out_b = dir.join("b");
    for out in [&out_a, &out_b] {
        run_ok(bin().args([
            "simulate",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
            "--threads",
            "2",
        ]));
    }
    for name in [
        "summary.json",
        "plot.csv",
        "transcript_7.csv",
        "transcript_8.csv",
    ] {
        let a = std::fs::read(out_a.join(name)).unwrap();
        let b = std::fs::read(out_b.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical runs");
    }
}

#[test]
fn summary_regret_matches_independent_recomputation() {
    let dir = scratch("recompute");
    let cfg = write_config(
        &dir,
        "cfg.json",
        serde_json::json!({
            "generator": {"family": "karmed", "means": [0.8, 0.3, 0.6], "f_grid_resolution": 3},
            "learner": "ls",
            "alpha": 0.7,
            "t": 50,
            "seeds": [3],
            "noise": "two_point"
        }),
    );
    let out = dir.join("out");
    run_ok(bin().args([
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]));
    let summary = read_json(&out.join("summary.json"));
    let reported = summary["per_seed"][0]["regret"].as_f64().unwrap();
    let csv = std::fs::read_to_string(out.join("transcript_3.csv")).unwrap();
    let recomputed: f64 = csv
        .lines()
        .skip(1)
        .map(|line| line.rsplit(',').next().unwrap().parse::<f64>().unwrap())
        .sum();
    assert!(
        (reported - recomputed).abs() < 1e-9,
        "summary {reported} vs transcript sum {recomputed}"
    );
}

#[test]
fn deterministic_karmed_summary_has_zero_regret_and_formula_comparator() {
    let dir = scratch("detk");
    let cfg = write_config(
        &dir,
        "cfg.json",
        serde_json::json!({
            "generator": {"family": "karmed", "means": [1.0, 0.2, 0.4], "f_grid_resolution": 1},
            "learner": "karmed_closed_form",
            "alpha": 1.0,
            "t": 10,
            "seeds": [1],
            "noise": "deterministic"
        }),
    );
    let out = dir.join("out");
    run_ok(bin().args([
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]));
    let summary = read_json(&out.join("summary.json"));
    assert_eq!(summary["mean_regret"].as_f64().unwrap(), 0.0);
    let d = summary["dimension_used"].as_u64().unwrap() as f64;
    let comparator = summary["comparator_regret_bound"]["value"]
        .as_f64()
        .unwrap();
    assert!((comparator - (1.0 + 12.0 * d.powf(1.5))).abs() < 1e-9);
}

#[test]
fn constant_faithful_mode_attaches_c_finite() {
    let dir = scratch("cfc");
    let cfg = write_config(
        &dir,
        "cfg.json",
        serde_json::json!({
            "generator": {"family": "karmed", "means": [0.9, 0.4], "f_grid_resolution": 2},
            "learner": "ls",
            "alpha": 0.75,
            "t": 25,
            "seeds": [1],
            "noise": "two_point",
            "bounds_mode": "constant_faithful",
            "delta": 0.1
        }),
    );
    let out = dir.join("out");
    run_ok(bin().args([
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]));
    let summary = read_json(&out.join("summary.json"));
    let card = summary["card_z"].as_u64().unwrap() as f64;
    let expected = 128.0 * (2.0 * 25.0 * card / 0.1).ln();
    assert!((summary["c_value"].as_f64().unwrap() - expected).abs() < 1e-9);
}

#[test]
fn dims_reports_singleton_dimension_one() {
    let dir = scratch("dims1");
    let cfg = write_config(
        &dir,
        "cfg.json",
        serde_json::json!({
            "generator": {"family": "karmed", "means": [1.0], "f_grid_resolution": 1},
            "alpha": 1.0,
            "epsilon": 0.5
        }),
    );
    let out = dir.join("out");
    run_ok(bin().args([
        "dims",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]));
    let report = read_json(&out.join("dims.json"));
    assert_eq!(report["dissimilarity"]["value"].as_u64().unwrap(), 1);
    assert_eq!(report["dissimilarity"]["certificate_valid"], true);
}

#[test]
fn dims_separation_report_carries_certificate_and_bound_checks() {
    let dir = scratch("dimsep");
    let cfg = write_config(
        &dir,
        "cfg.json",
        serde_json::json!({
            "generator": {"family": "separation", "n_special": 20, "eps": 0.25,
                           "sample_count": 4, "resolution": 48, "seed": 7},
            "epsilon": 0.25
        }),
    );
    let out = dir.join("out");
    run_ok(bin().args([
        "dims",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]));
    let report = read_json(&out.join("dims.json"));
    assert_eq!(
        report["separation"]["eluder_lower_bound"].as_u64().unwrap(),
        20
    );
    assert_eq!(report["separation"]["certificate_valid"], true);
    for check in report["separation"]["dissimilarity_subinstances"]
        .as_array()
        .unwrap()
    {
        assert_eq!(check["holds"], true);
    }
}

#[test]
fn oversized_exact_search_exits_three() {
    let dir = scratch("cap");
    let cfg = write_config(
        &dir,
        "cfg.json",
        serde_json::json!({
            "generator": {"family": "sphere", "n": 2, "resolution": 30, "target_index": 0},
            "epsilon": 0.5
        }),
    );
    let status = bin()
        .args([
            "cover",
            "--config",
            cfg.to_str().unwrap(),
            "--mode",
            "exact",
            "--out",
            dir.join("out").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(3));
}

#[test]
fn missing_config_exits_two() {
    let status = bin()
        .args([
            "simulate",
            "--config",
            "/nonexistent/cfg.json",
            "--out",
            "/tmp/x",
        ])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
}

#[test]
fn pac_without_epsilon_exits_two() {
    let dir = scratch("paceps");
    let cfg = write_config(
        &dir,
        "cfg.json",
        serde_json::json!({
            "generator": {"family": "karmed", "means": [0.9, 0.4], "f_grid_resolution": 2},
            "alpha": 0.75,
            "noise": "deterministic"
        }),
    );
    let status = bin()
        .args([
            "pac",
            "--config",
            cfg.to_str().unwrap(),
            "--out",
            dir.join("out").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
}

#[test]
fn pac_deterministic_fixture_succeeds_always() {
    let dir = scratch("pacdet");
    let cfg = write_config(
        &dir,
        "cfg.json",
        serde_json::json!({
            "generator": {"family": "karmed", "means": [0.9, 0.35, 0.55], "f_grid_resolution": 3},
            "learner": "ls",
            "alpha": 0.75,
            "seeds": [1],
            "noise": "deterministic",
            "epsilon": 0.5,
            "delta": 0.5,
            "trials": 10
        }),
    );
    let out = dir.join("out");
    run_ok(bin().args([
        "pac",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]));
    let report = read_json(&out.join("pac.json"));
    assert_eq!(report["success_rate"].as_f64().unwrap(), 1.0);
    assert_eq!(report["deterministic"], true);
}

#[test]
fn pac_echoes_n1_from_delta() {
    let dir = scratch("pacn1");
    let cfg = write_config(
        &dir,
        "cfg.json",
        serde_json::json!({
            "generator": {"family": "sphere", "n": 2, "resolution": 12, "target_index": 3},
            "learner": "ls",
            "alpha": 1.0,
            "seeds": [2],
            "noise": "two_point",
            "bounds_mode": "empirical",
            "epsilon": 0.5,
            "delta": 0.5,
            "trials": 3,
            "t": 200
        }),
    );
    let out = dir.join("out");
    run_ok(bin().args([
        "pac",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]));
    let report = read_json(&out.join("pac.json"));
    assert_eq!(report["n1"].as_u64().unwrap(), 3); // ceil(log2(4/0.5))
}

#[test]
fn lowerbound_reports_comparators_and_contrast() {
    let dir = scratch("lb");
    let out = dir.join("out");
    run_ok(bin().args([
        "lowerbound",
        "--n",
        "50",
        "--eps",
        "0.5",
        "--t",
        "25",
        "--learner",
        "scan",
        "--trials",
        "60",
        "--seed",
        "9",
        "--resolution",
        "128",
        "--out",
        out.to_str().unwrap(),
    ]));
    let report = read_json(&out.join("lowerbound.json"));
    let comparator = report["experiment"]["regret_comparator"].as_f64().unwrap();
    assert!((comparator - 2.2073).abs() < 1e-3);
    assert_eq!(
        report["meets_lower_bound"]["mean_regret_vs_0.8x_comparator"],
        true
    );
    assert_eq!(report["in_class_contrast"]["beats_lower_bound_rate"], true);
}

#[test]
fn lowerbound_zero_trials_exits_two() {
    let status = bin()
        .args([
            "lowerbound",
            "--n",
            "10",
            "--eps",
            "0.5",
            "--t",
            "5",
            "--learner",
            "scan",
            "--trials",
            "0",
            "--resolution",
            "32",
            "--out",
            "/tmp/lb0",
        ])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(2));
}

#[test]
fn cover_reports_singleton() {
    let dir = scratch("cov");
    let cfg = write_config(
        &dir,
        "cfg.json",
        serde_json::json!({
            "generator": {"family": "karmed", "means": [1.0], "f_grid_resolution": 1},
            "epsilon": 0.25
        }),
    );
    let out = dir.join("out");
    run_ok(bin().args([
        "cover",
        "--config",
        cfg.to_str().unwrap(),
        "--mode",
        "exact",
        "--out",
        out.to_str().unwrap(),
    ]));
    let report = read_json(&out.join("cover.json"));
    assert_eq!(report["report"]["size"].as_u64().unwrap(), 1);
}

#[test]
fn bounds_command_prints_reports() {
    let dir = scratch("bnd");
    let cfg = write_config(
        &dir,
        "bounds.json",
        serde_json::json!({
            "bounds": [
                {"name": "c_finite", "t": 100, "card_z": 10, "delta": 0.1},
                {"name": "pac_params_deterministic", "d": 4, "eps": 0.5},
                {"name": "bad_query_bound", "d": 4, "c": 0.0, "eps": 1.5, "alpha": 0.5}
            ]
        }),
    );
    let out = run_ok(bin().args(["bounds", "--config", cfg.to_str().unwrap()]));
    let parsed: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("bounds output is JSON");
    let reports = parsed.as_array().unwrap();
    assert_eq!(reports.len(), 3);
    assert!((reports[0]["value"].as_f64().unwrap() - 1267.646).abs() < 1e-2);
    assert_eq!(reports[1]["value"].as_u64().unwrap(), 34);
    assert!(reports[2]["note"].as_str().unwrap().contains("no query"));
}
