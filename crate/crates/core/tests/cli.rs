use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn ge_dbs(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ge-dbs"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("GE_DBS_SEED")
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn data_rows(path: &Path) -> usize {
    fs::read_to_string(path).unwrap().lines().count() - 1
}

#[test]
fn gen_data_writes_benchmarks() {
    let dir = tempfile::tempdir().unwrap();
    assert!(ge_dbs(&["gen-data", "parity5"], dir.path())
        .status
        .success());
    assert_eq!(data_rows(&dir.path().join("parity5.csv")), 32);
    assert!(ge_dbs(&["gen-data", "keijzer-4"], dir.path())
        .status
        .success());
    assert_eq!(data_rows(&dir.path().join("keijzer-4.csv")), 402);

    let o = ge_dbs(&["gen-data", "keijzer-99"], dir.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("parity5") && stderr(&o).contains("keijzer-4"));
}

#[test]
fn gen_data_is_reproducible() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    ge_dbs(&["gen-data", "nguyen-9", "--seed", "7"], a.path());
    ge_dbs(&["gen-data", "nguyen-9", "--seed", "7"], b.path());
    let read = |d: &Path| fs::read(d.join("nguyen-9.csv")).unwrap();
    assert_eq!(read(a.path()), read(b.path()));
}

#[test]
fn select_budgets() {
    let dir = tempfile::tempdir().unwrap();
    ge_dbs(&["gen-data", "parity5"], dir.path());
    let csv = dir.path().join("parity5.csv");
    let csv = csv.to_str().unwrap();

    let o = ge_dbs(
        &[
            "select", "--data", csv, "--domain", "circuit", "--budget", "100",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(data_rows(&dir.path().join("parity5_dbs_100.csv")), 32);

    let o = ge_dbs(&["select", "parity5", "--budget", "50"], dir.path());
    assert!(o.status.success());
    assert_eq!(data_rows(&dir.path().join("parity5_dbs_50.csv")), 16);
    assert_eq!(data_rows(&dir.path().join("parity5_dbs_50_plan.csv")), 16);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("clusters: 2"));

    let o = ge_dbs(&["select", "parity5", "--budget", "0"], dir.path());
    assert!(!o.status.success());
    assert!(stderr(&o).contains("budget"));
}

#[test]
fn select_single_cluster_uses_ceil() {
    // 32 identical inputs leave one cluster; ceil(0.45 * 32) = 15.
    let dir = tempfile::tempdir().unwrap();
    let mut text = String::from("x0,y0\n");
    for i in 0..32 {
        text.push_str(&format!("1,{i}\n"));
    }
    let csv = dir.path().join("flat.csv");
    fs::write(&csv, text).unwrap();
    let o = ge_dbs(
        &["select", "--data", csv.to_str().unwrap(), "--budget", "45"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(data_rows(&dir.path().join("flat_dbs_45.csv")), 15);
}

#[test]
fn experiment_report_shape() {
    let dir = tempfile::tempdir().unwrap();
    let o = ge_dbs(
        &[
            "experiment",
            "parity5",
            "--runs",
            "2",
            "--generations",
            "5",
            "--population",
            "20",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    let treatments = report["treatments"].as_array().unwrap();
    assert_eq!(treatments.len(), 7);
    assert!(treatments
        .iter()
        .all(|t| t["runs"].as_array().unwrap().len() == 2));
    assert_eq!(data_rows(&dir.path().join("summary.csv")), 7);

    let o = ge_dbs(
        &[
            "experiment",
            "parity5",
            "--runs",
            "2",
            "--generations",
            "2",
            "--population",
            "10",
            "--budgets",
            "50",
        ],
        dir.path(),
    );
    assert!(o.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    let labels: Vec<&str> = report["treatments"]
        .as_array()
        .unwrap()
        .iter()
        .map(|t| t["label"].as_str().unwrap())
        .collect();
    assert_eq!(labels, ["baseline", "dbs_50"]);
}

#[test]
fn experiment_config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    fs::write(
        &config,
        "population_size = 12\ngenerations = 2\nruns = 3\nbudgets = [70.0]\n",
    )
    .unwrap();
    let o = ge_dbs(
        &[
            "experiment",
            "parity5",
            "--config",
            config.to_str().unwrap(),
            "--runs",
            "2",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["config"]["evolution"]["population_size"], 12);
    assert_eq!(report["config"]["runs"], 2);
    assert_eq!(report["treatments"].as_array().unwrap().len(), 2);

    fs::write(&config, "populaton_size = 12\n").unwrap();
    let o = ge_dbs(
        &[
            "experiment",
            "parity5",
            "--config",
            config.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert!(!o.status.success());
    assert!(stderr(&o).contains("populaton_size"));
}

#[test]
fn missing_grammar_fails() {
    let dir = tempfile::tempdir().unwrap();
    let o = ge_dbs(
        &[
            "experiment",
            "parity5",
            "--runs",
            "1",
            "--grammar",
            "/no/such/grammar.bnf",
        ],
        dir.path(),
    );
    assert!(!o.status.success());
    assert!(stderr(&o).contains("grammar.bnf"));
    assert!(!dir.path().join("report.json").exists());
}

#[test]
fn evolve_with_env_seed() {
    let run = |dir: &Path| {
        Command::new(env!("CARGO_BIN_EXE_ge-dbs"))
            .args([
                "evolve",
                "keijzer-4",
                "--generations",
                "3",
                "--population",
                "20",
                "--out",
            ])
            .arg(dir)
            .env("GE_DBS_SEED", "9")
            .output()
            .unwrap()
    };
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(run(a.path()).status.success());
    assert!(run(b.path()).status.success());
    let trace = |d: &Path| fs::read_to_string(d.join("trace.jsonl")).unwrap();
    let strip = |t: String| -> Vec<serde_json::Value> {
        t.lines()
            .map(|l| {
                let mut v: serde_json::Value = serde_json::from_str(l).unwrap();
                v.as_object_mut().unwrap().remove("eval_millis");
                v
            })
            .collect()
    };
    assert_eq!(strip(trace(a.path())), strip(trace(b.path())));
    let best: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(a.path().join("best.json")).unwrap()).unwrap();
    assert_eq!(best["seed"], 9);
    assert_eq!(best["train_size"], 282);
    assert_eq!(best["test_size"], 120);
}

#[test]
fn stats_small_exact() {
    let dir = tempfile::tempdir().unwrap();
    let o = ge_dbs(
        &["stats", "--baseline", "3,4", "--treatment", "1,2"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("stats.json")).unwrap()).unwrap();
    assert!((v["p_less"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-12);
    assert_eq!(v["exact"], true);
}

#[test]
fn unknown_flag_fails_fast() {
    let dir = tempfile::tempdir().unwrap();
    let o = ge_dbs(&["gen-data", "parity5", "--bogus"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    let help = Command::new(env!("CARGO_BIN_EXE_ge-dbs"))
        .args(["experiment", "--help"])
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&help.stdout);
    for flag in [
        "--runs",
        "--budgets",
        "--jobs",
        "--grammar",
        "--config",
        "--seed",
        "--out",
    ] {
        assert!(text.contains(flag), "{flag}");
    }
}
