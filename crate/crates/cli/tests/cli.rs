//! End-to-end tests of the `wardsim` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use wardsim::{Experiment, ModelId};

fn wardsim(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wardsim"))
        .args(args)
        .current_dir(dir)
        .env_remove("WARDSIM_SEED")
        .output()
        .expect("binary runs")
}

fn write_example(dir: &Path, model: ModelId) -> String {
    let name = format!("{model}.json");
    fs::write(dir.join(&name), Experiment::example_json(model)).unwrap();
    name
}

fn read(dir: &Path, file: &str) -> String {
    fs::read_to_string(dir.join(file)).unwrap()
}

#[test]
fn run_twice_gives_identical_files() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    for model in [ModelId::Ccu, ModelId::Stroke] {
        let cfg = write_example(d, model);
        for out in ["a", "b"] {
            let o = wardsim(&["run", "--config", &cfg, "--seed", "42", "--out", out], d);
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        }
        for f in ["results.csv", "results.md", "results_full.csv"] {
            assert_eq!(read(d, &format!("a/{f}")), read(d, &format!("b/{f}")));
        }
    }
}

#[test]
fn one_replication_gives_zero_sd_column() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_example(tmp.path(), ModelId::Ccu);
    let o = wardsim(&["run", "--config", &cfg, "--replications", "1", "--out", "o"], tmp.path());
    assert!(o.status.success());
    let full = read(tmp.path(), "o/results_full.csv");
    for line in full.lines().skip(1) {
        assert!(line.ends_with(",0"), "{line}");
    }
    assert!(String::from_utf8_lossy(&o.stdout).contains("single replication"));
}

#[test]
fn invalid_config_names_field_and_writes_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(Experiment::example_json(ModelId::Ccu)).unwrap();
    doc["los"].as_object_mut().unwrap().remove("AandE");
    fs::write(tmp.path().join("bad.json"), doc.to_string()).unwrap();
    let o = wardsim(&["run", "--config", "bad.json", "--out", "o"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("los.AandE"));
    assert!(!tmp.path().join("o").exists());
}

#[test]
fn overrides_validate_like_document_values() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_example(tmp.path(), ModelId::Stroke);
    let o = wardsim(&["run", "--config", &cfg, "--warm-up=-5", "--out", "o"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warm_up_days"));
    let o = wardsim(&["run", "--config", &cfg, "--replications", "0", "--out", "o"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(!tmp.path().join("o").exists());
}

#[test]
fn seed_falls_back_to_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(Experiment::example_json(ModelId::Ccu)).unwrap();
    doc.as_object_mut().unwrap().remove("seed");
    doc["replications"] = 1.into();
    fs::write(tmp.path().join("noseed.json"), doc.to_string()).unwrap();
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_wardsim"));
        c.args(["run", "--config", "noseed.json", "--out", "o"]).args(extra).current_dir(tmp.path());
        match env {
            Some(v) => c.env("WARDSIM_SEED", v),
            None => c.env_remove("WARDSIM_SEED"),
        };
        String::from_utf8(c.output().unwrap().stdout).unwrap()
    };
    assert!(run(None, &[]).contains("seed 0;"));
    assert!(run(Some("77"), &[]).contains("seed 77;"));
    assert!(run(Some("77"), &["--seed", "5"]).contains("seed 5;"));
}

#[test]
fn stroke_run_writes_distribution_files_and_trace() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_example(tmp.path(), ModelId::Stroke);
    let o = wardsim(
        &["run", "--config", &cfg, "--trace", "--run-length", "500", "--warm-up", "100", "--out", "o"],
        tmp.path(),
    );
    assert!(o.status.success());
    for f in ["occupancy_ASU.csv", "occupancy_Rehab.csv", "delay_ASU.csv", "delay_Rehab.csv", "trace.txt"] {
        assert!(tmp.path().join("o").join(f).exists(), "{f}");
    }
    assert!(read(tmp.path(), "o/delay_ASU.csv").starts_with("capacity,p_delay\n5,"));
    assert!(read(tmp.path(), "o/occupancy_Rehab.csv").starts_with("occupancy,probability\n0,"));
}

#[test]
fn sweep_has_six_columns_and_constant_patient_count() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_example(tmp.path(), ModelId::Ccu);
    let o = wardsim(
        &["sweep", "--config", &cfg, "--param", "n_beds", "--values", "23:28", "--out", "o"],
        tmp.path(),
    );
    assert!(o.status.success());
    let csv = read(tmp.path(), "o/results.csv");
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap().split(',').count(), 7);
    let counts: Vec<&str> = lines.next().unwrap().split(',').skip(1).collect();
    assert!(counts.iter().all(|c| *c == counts[0]), "{counts:?}");
}

#[test]
fn single_value_sweep_matches_run() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_example(tmp.path(), ModelId::Ccu);
    wardsim(&["run", "--config", &cfg, "--out", "r"], tmp.path());
    wardsim(&["sweep", "--config", &cfg, "--param", "n_beds", "--values", "24", "--out", "s"], tmp.path());
    let strip = |s: String| s.lines().skip(1).map(|l| l.split(',').skip(2).collect::<Vec<_>>().join(",")).collect::<Vec<_>>();
    assert_eq!(strip(read(tmp.path(), "r/results_full.csv")), strip(read(tmp.path(), "s/results_full.csv")));
}

#[test]
fn diff_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    let cfg = write_example(d, ModelId::Ccu);
    let stroke = write_example(d, ModelId::Stroke);
    wardsim(&["run", "--config", &cfg, "--out", "a"], d);
    wardsim(&["run", "--config", &cfg, "--out", "b"], d);
    wardsim(&["run", "--config", &stroke, "--out", "s"], d);
    wardsim(&["run", "--config", &cfg, "--seed", "9", "--replications", "2", "--out", "c"], d);

    assert_eq!(wardsim(&["diff", "a", "b"], d).status.code(), Some(0));
    let o = wardsim(&["diff", "a/results_full.csv", "c/results_full.csv", "--tol", "0.001"], d);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
    assert_eq!(wardsim(&["diff", "a", "s"], d).status.code(), Some(2));
    assert_eq!(wardsim(&["diff", "a", "missing"], d).status.code(), Some(2));
}

#[test]
fn example_config_round_trips() {
    let tmp = tempfile::tempdir().unwrap();
    for model in ["ccu", "stroke"] {
        let o = wardsim(&["example-config", model], tmp.path());
        assert!(o.status.success());
        Experiment::from_json(&String::from_utf8(o.stdout).unwrap()).unwrap();
    }
    assert_eq!(wardsim(&["example-config", "xyz"], tmp.path()).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    assert_eq!(wardsim(&["run"], tmp.path()).status.code(), Some(2));
    assert_eq!(wardsim(&["bogus"], tmp.path()).status.code(), Some(2));
    let cfg = write_example(tmp.path(), ModelId::Ccu);
    let o = wardsim(&["sweep", "--config", &cfg, "--param", "n_beds", "--values", "9:1"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn selftest_reports_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let o = wardsim(&["selftest", "--model", "ccu"], tmp.path());
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).contains("ccu: 37/37 checks passed"));
}
