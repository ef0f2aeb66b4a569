//! End-to-end tests of the binary: spawn the real executable, parse its
//! stdout, and check the exit code contract.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn sindex() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sindex"))
}

fn run(args: &[&str]) -> Output {
    sindex().args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

/// Parses the leading JSON documents of a stdout stream (resolved config
/// first, then results), ignoring trailing human-readable lines.
fn json_docs(text: &str) -> Vec<serde_json::Value> {
    serde_json::Deserializer::from_str(text)
        .into_iter::<serde_json::Value>()
        .take_while(Result::is_ok)
        .map(Result::unwrap)
        .collect()
}

#[test]
fn census_estimate_matches_response_sum() {
    let dir = tempfile::tempdir().unwrap();
    let pop = dir.path().join("pop.csv");
    let gen = run(&[
        "gen-population",
        "--mean-fn",
        "m3",
        "--sigma",
        "0.1",
        "--size",
        "120",
        "--seed",
        "11",
        "--out",
        pop.to_str().unwrap(),
    ]);
    assert!(gen.status.success(), "{}", String::from_utf8_lossy(&gen.stderr));

    let t_y: f64 = {
        let text = fs::read_to_string(&pop).unwrap();
        text.lines()
            .skip(1)
            .map(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap())
            .sum()
    };

    let est = run(&[
        "estimate",
        "--population",
        pop.to_str().unwrap(),
        "--design",
        "census",
        "--estimators",
        "ht,lreg,sim",
    ]);
    assert!(est.status.success(), "{}", String::from_utf8_lossy(&est.stderr));
    let docs = json_docs(&stdout(&est));
    assert_eq!(docs.len(), 2, "config echo plus one results array");
    assert_eq!(docs[0]["command"], "estimate");
    assert_eq!(docs[0]["tool"], "sindex");
    let reports = docs[1].as_array().unwrap();
    assert_eq!(reports.len(), 3);
    for report in reports {
        let t_hat = report["t_hat"].as_f64().unwrap();
        assert!(
            (t_hat - t_y).abs() / t_y.abs() < 1e-9,
            "{}: {t_hat} vs {t_y}",
            report["estimator"]
        );
    }
}

#[test]
fn sample_file_mode_reproduces_hand_value() {
    let dir = tempfile::tempdir().unwrap();
    let pop = dir.path().join("pop.csv");
    let samp = dir.path().join("sample.csv");
    fs::write(
        &pop,
        "id,x1,x2\na,0.1,0.2\nb,0.3,0.4\nc,0.5,0.1\nd,0.7,0.9\ne,0.9,0.6\n",
    )
    .unwrap();
    fs::write(&samp, "id,y\nb,5.0\nd,4.0\n").unwrap();
    let est = run(&[
        "estimate",
        "--population",
        pop.to_str().unwrap(),
        "--sample",
        samp.to_str().unwrap(),
        "--estimators",
        "ht",
    ]);
    assert!(est.status.success(), "{}", String::from_utf8_lossy(&est.stderr));
    let docs = json_docs(&stdout(&est));
    let report = &docs[1].as_array().unwrap()[0];
    // Two of five units under SRSWOR: weights 2.5, so 2.5 * (5 + 4).
    assert_eq!(report["t_hat"].as_f64().unwrap(), 22.5);
    assert_eq!(report["n"].as_i64().unwrap(), 2);
    assert_eq!(report["N"].as_i64().unwrap(), 5);
}

#[test]
fn unknown_sample_id_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let pop = dir.path().join("pop.csv");
    let samp = dir.path().join("sample.csv");
    fs::write(&pop, "id,x1\na,0.1\nb,0.3\nc,0.5\n").unwrap();
    fs::write(&samp, "id,y\nzz,5.0\n").unwrap();
    let est = run(&[
        "estimate",
        "--population",
        pop.to_str().unwrap(),
        "--sample",
        samp.to_str().unwrap(),
        "--estimators",
        "ht",
    ]);
    assert_eq!(est.status.code(), Some(2));
    let err = String::from_utf8_lossy(&est.stderr);
    assert!(err.contains("zz"), "stderr names the offending id: {err}");
}

#[test]
fn exit_codes_follow_the_contract() {
    // Usage: bad flag value rejected by the parser.
    let bad_flag = run(&["estimate", "--population", "x.csv", "--design", "stratified"]);
    assert_eq!(bad_flag.status.code(), Some(1));

    // Usage: estimate needs a seed to draw (no SINDEX_SEED set).
    let dir = tempfile::tempdir().unwrap();
    let pop = dir.path().join("pop.csv");
    fs::write(&pop, "id,x1,y\na,0.1,1.0\nb,0.3,2.0\nc,0.5,3.0\n").unwrap();
    let mut cmd = sindex();
    cmd.args([
        "estimate",
        "--population",
        pop.to_str().unwrap(),
        "--n",
        "2",
        "--estimators",
        "ht",
    ]);
    cmd.env_remove("SINDEX_SEED");
    let no_seed = cmd.output().unwrap();
    assert_eq!(no_seed.status.code(), Some(1));

    // Data: missing population file.
    let missing = run(&[
        "estimate",
        "--population",
        "/definitely/not/here.csv",
        "--n",
        "5",
        "--seed",
        "1",
    ]);
    assert_eq!(missing.status.code(), Some(2));

    // Config: unknown mean function in a simulate config.
    let cfg = dir.path().join("bad.json");
    fs::write(
        &cfg,
        r#"{"populations":[{"mean_fn":"m9","sigma":0.1}],"design":"srswor",
            "sample_sizes":[10],"estimators":["ht"],"replicates":2,"base_seed":1}"#,
    )
    .unwrap();
    let bad_cfg = run(&["simulate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(bad_cfg.status.code(), Some(1));
    let err = String::from_utf8_lossy(&bad_cfg.stderr);
    assert!(err.contains("m1..m6"), "error names valid options: {err}");
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let pop = dir.path().join("pop.csv");
    fs::write(
        &pop,
        "id,x1,y\na,0.1,1.0\nb,0.3,2.0\nc,0.5,3.0\nd,0.7,4.0\ne,0.9,5.0\n",
    )
    .unwrap();
    let mut cmd = sindex();
    cmd.args([
        "estimate",
        "--population",
        pop.to_str().unwrap(),
        "--n",
        "2",
        "--estimators",
        "ht",
    ]);
    cmd.env("SINDEX_SEED", "5");
    let out = cmd.output().unwrap();
    assert!(out.status.success());
    let docs = json_docs(&stdout(&out));
    assert_eq!(docs[0]["seed"].as_u64(), Some(5));
    assert_eq!(docs[1].as_array().unwrap()[0]["seed"].as_u64(), Some(5));
}

#[test]
fn simulate_is_deterministic_across_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("grid.json");
    fs::write(
        &cfg,
        r#"{"populations":[{"mean_fn":"m1","sigma":0.1}],"population_size":80,
            "design":"srswor","sample_sizes":[20],"estimators":["ht","sim"],
            "replicates":10,"base_seed":3}"#,
    )
    .unwrap();
    let out_a = dir.path().join("a.csv");
    let out_b = dir.path().join("b.csv");
    let a = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_a.to_str().unwrap(),
        "--jobs",
        "1",
    ]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let b = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_b.to_str().unwrap(),
        "--jobs",
        "3",
    ]);
    assert!(b.status.success());
    assert_eq!(fs::read(&out_a).unwrap(), fs::read(&out_b).unwrap());

    let text = fs::read_to_string(&out_a).unwrap();
    let header = text.lines().next().unwrap();
    for col in ["estimator", "mean", "bias", "sd", "mse", "mse_ratio_vs_sim"] {
        assert!(header.split(',').any(|h| h == col), "missing column {col}");
    }
    // The resolved config echo appears before any results on stdout.
    let echo = stdout(&a);
    let config_doc = &json_docs(&echo)[0];
    assert_eq!(config_doc["command"], "simulate");
    assert_eq!(config_doc["config"]["base_seed"].as_u64(), Some(3));
}

#[test]
fn simulate_accepts_replicate_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("grid.json");
    fs::write(
        &cfg,
        r#"{"populations":[{"mean_fn":"m2","sigma":0.2}],"population_size":60,
            "design":"srswor","sample_sizes":[15],"estimators":["ht"],
            "replicates":50,"base_seed":9}"#,
    )
    .unwrap();
    let out_csv = dir.path().join("t.csv");
    let out = run(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--replicates",
        "1",
        "--out",
        out_csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&out_csv).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| row[header.iter().position(|h| *h == name).unwrap()];
    assert_eq!(col("replicates"), "1");
    // A single replicate has no spread.
    assert_eq!(col("sd"), "0");
}

#[test]
fn bundled_benchmark_config_runs() {
    let cfg = format!(
        "{}/../../configs/table2_desk.json",
        env!("CARGO_MANIFEST_DIR")
    );
    let dir = tempfile::tempdir().unwrap();
    let out_csv = dir.path().join("t.csv");
    // Two replicates keep the smoke test quick; the full grid is the
    // config's own business.
    let out = run(&[
        "simulate",
        "--config",
        &cfg,
        "--replicates",
        "2",
        "--out",
        out_csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(&out_csv).unwrap();
    // Six populations crossed with two sample sizes, three estimators each.
    assert_eq!(text.lines().count(), 1 + 6 * 2 * 3);
}

#[test]
fn check_gradient_passes_and_reports_deviation() {
    let out = run(&["check-gradient", "--d", "3", "--n", "40", "--seed", "2", "--instances", "2"]);
    assert!(out.status.success());
    let docs = json_docs(&stdout(&out));
    let worst = docs[1]["max_rel_dev"].as_f64().unwrap();
    assert!(worst < 1e-4, "deviation {worst}");

    let flat = run(&["check-gradient", "--constant-y", "--seed", "8"]);
    assert!(flat.status.success());
}

#[test]
fn oracle_reports_direction_and_risk() {
    let dir = tempfile::tempdir().unwrap();
    let pop = dir.path().join("pop.csv");
    let gen = run(&[
        "gen-population",
        "--mean-fn",
        "m5",
        "--sigma",
        "0.1",
        "--size",
        "400",
        "--seed",
        "21",
        "--out",
        pop.to_str().unwrap(),
    ]);
    assert!(gen.status.success());
    let preds = dir.path().join("m.csv");
    let out = run(&[
        "oracle",
        "--population",
        pop.to_str().unwrap(),
        "--predictions-out",
        preds.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let docs = json_docs(&stdout(&out));
    let theta = docs[1]["theta_original"].as_array().unwrap();
    assert_eq!(theta.len(), 4);
    // The generating direction is (1,1,0,1)/sqrt(3).
    let want = 1.0 / 3f64.sqrt();
    assert!((theta[0].as_f64().unwrap() - want).abs() < 0.1);
    assert!(theta[2].as_f64().unwrap().abs() < 0.1);
    assert!(docs[1]["trace"]["converged"].as_bool().unwrap());

    let pred_lines = fs::read_to_string(&preds).unwrap();
    assert_eq!(pred_lines.lines().count(), 401, "header plus one row per unit");
    assert!(Path::new(&preds).exists());
}
