//! End-to-end tests against the built `flowml` binary.

use std::path::Path;
use std::process::{Command, Output};

fn flowml(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_flowml"))
        .args(args)
        .output()
        .expect("failed to launch flowml")
}

fn stderr_line(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).trim_end().to_string()
}

fn assert_single_error_line(out: &Output, kind: &str) {
    assert!(!out.status.success(), "expected failure exit code");
    let err = stderr_line(out);
    assert_eq!(err.lines().count(), 1, "expected one error line, got: {err}");
    assert!(
        err.starts_with(&format!("error: {kind}:")),
        "expected `error: {kind}: ...`, got: {err}"
    );
}

#[test]
fn generate_writes_deterministic_csv() {
    let dir = tempfile::tempdir().unwrap();
    let run = |p: &Path| {
        let out = flowml(&[
            "generate",
            "--synth",
            "blobs",
            "--rows",
            "50",
            "--attack-fraction",
            "0.4",
            "--seed",
            "9",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr_line(&out));
        std::fs::read(p).unwrap()
    };
    let first = run(&dir.path().join("flows.csv"));
    let second = run(&dir.path().join("flows2.csv"));
    assert_eq!(first, second, "same seed must give byte-identical CSV");

    let text = String::from_utf8(first).unwrap();
    assert!(text.starts_with("pkt_size_mean,pkt_rate,duration,protocol,label\n"));
    assert_eq!(text.lines().count(), 51);
    let ddos = text.lines().filter(|l| l.ends_with(",ddos")).count();
    assert_eq!(ddos, 20);
}

#[test]
fn generate_rejects_xor() {
    let out = flowml(&["generate", "--synth", "xor", "--out", "/tmp/unused.csv"]);
    assert_single_error_line(&out, "config");
}

#[test]
fn bench_produces_reports_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let run = |sub: &str| {
        let out_dir = dir.path().join(sub);
        let out = flowml(&[
            "bench",
            "--synth",
            "iotmix",
            "--rows",
            "400",
            "--attack-fraction",
            "0.4",
            "--seed",
            "7",
            "--gbt-rounds",
            "20",
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr_line(&out));
        let stdout = String::from_utf8_lossy(&out.stdout).to_string();
        (out_dir, stdout)
    };

    let (dir_a, stdout) = run("a");
    for file in ["report.txt", "heatmap.csv", "report.json"] {
        assert!(dir_a.join(file).exists(), "{file} missing");
    }
    assert!(stdout.contains("Model"));
    for name in ["GBT", "KNN", "SGD-Linear", "GaussianNB"] {
        assert!(stdout.contains(name), "stdout missing {name} row");
    }

    let (dir_b, _) = run("b");
    assert_eq!(
        std::fs::read(dir_a.join("report.txt")).unwrap(),
        std::fs::read(dir_b.join("report.txt")).unwrap()
    );
    assert_eq!(
        std::fs::read(dir_a.join("heatmap.csv")).unwrap(),
        std::fs::read(dir_b.join("heatmap.csv")).unwrap()
    );

    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir_a.join("report.json")).unwrap()).unwrap();
    assert_eq!(json["models"].as_array().unwrap().len(), 4);
    assert_eq!(json["seed"], 7);
    assert_eq!(json["rows_total"], 400);
    let heatmap = std::fs::read_to_string(dir_a.join("heatmap.csv")).unwrap();
    assert_eq!(heatmap.lines().count(), 17);
    assert_eq!(heatmap.lines().next().unwrap(), "model,metric,value");
}

#[test]
fn bench_rejects_missing_input_file() {
    let out = flowml(&[
        "bench",
        "--input",
        "/nonexistent/data.csv",
        "--out",
        "/tmp/unused-bench",
    ]);
    assert_single_error_line(&out, "io");
}

#[test]
fn bench_rejects_conflicting_sources() {
    let out = flowml(&[
        "bench",
        "--input",
        "x.csv",
        "--synth",
        "blobs",
        "--out",
        "/tmp/unused-bench",
    ]);
    assert_single_error_line(&out, "config");
}

#[test]
fn bench_reports_single_class_data() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("one-class.csv");
    let mut text = String::from("pkt_size_mean,pkt_rate,duration,protocol,label\n");
    for i in 0..20 {
        text.push_str(&format!("{},{},{},TCP,benign\n", 100 + i, 50 + i, i + 1));
    }
    std::fs::write(&csv, text).unwrap();
    let out = flowml(&[
        "bench",
        "--input",
        csv.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_single_error_line(&out, "stratify");
}

#[test]
fn bench_reports_empty_dataset() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("all-bad.csv");
    std::fs::write(
        &csv,
        "pkt_size_mean,pkt_rate,duration,protocol,label\n,,-1,TCP,ddos\nx,y,z,UDP,benign\n",
    )
    .unwrap();
    let out = flowml(&[
        "bench",
        "--input",
        csv.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_single_error_line(&out, "empty-dataset");
}

#[test]
fn bench_reads_config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("bench.toml");
    let out_dir = dir.path().join("out");
    std::fs::write(
        &cfg_path,
        format!(
            r#"
synth = "blobs"
rows = 200
attack_fraction = 0.5
noise_sigma = 0.5
seed = 3
out = "{}"

[gbt]
rounds = 10

[sgd]
epochs = 5
"#,
            out_dir.display()
        ),
    )
    .unwrap();

    // --seed on the command line must beat the file's seed = 3
    let out = flowml(&[
        "bench",
        "--config",
        cfg_path.to_str().unwrap(),
        "--seed",
        "11",
    ]);
    assert!(out.status.success(), "{}", stderr_line(&out));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(json["seed"], 11);
    assert_eq!(json["rows_total"], 200);
}

#[test]
fn bench_rejects_bad_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("bad.toml");
    std::fs::write(&cfg_path, "sed = 7\n").unwrap();
    let out = flowml(&["bench", "--config", cfg_path.to_str().unwrap()]);
    assert_single_error_line(&out, "config");
}

#[test]
fn train_then_evaluate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("flows.csv");
    let artifact = dir.path().join("model.json");

    let out = flowml(&[
        "generate",
        "--synth",
        "blobs",
        "--rows",
        "300",
        "--attack-fraction",
        "0.5",
        "--noise-sigma",
        "0.5",
        "--seed",
        "21",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_line(&out));

    let out = flowml(&[
        "train",
        "--model",
        "gbt",
        "--input",
        csv.to_str().unwrap(),
        "--gbt-rounds",
        "20",
        "--seed",
        "21",
        "--out",
        artifact.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_line(&out));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&artifact).unwrap()).unwrap();
    assert_eq!(doc["model"]["kind"], "gbt");
    assert_eq!(doc["seed"], 21);
    assert!(doc["scaler"]["min"].is_array());
    assert!(doc["feature_mask"]["kept"].is_array());

    let out = flowml(&[
        "evaluate",
        "--artifact",
        artifact.to_str().unwrap(),
        "--input",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_line(&out));
    let stdout = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(stdout.contains("Model: GBT"));
    assert!(stdout.contains("Accuracy:"));
    assert!(stdout.contains("F1 Score:"));
    // separable training data scored on itself: expect a perfect run
    assert!(stdout.contains("Accuracy:  100.00%"), "stdout: {stdout}");
}

#[test]
fn evaluate_rejects_mismatched_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let artifact = dir.path().join("xor.json");
    let csv = dir.path().join("flows.csv");

    // an artifact trained on the 2-column xor matrix cannot score flow CSVs
    let out = flowml(&[
        "train",
        "--model",
        "gnb",
        "--synth",
        "xor",
        "--rows",
        "100",
        "--noise-sigma",
        "0.1",
        "--threshold",
        "0.0",
        "--out",
        artifact.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_line(&out));

    let out = flowml(&[
        "generate",
        "--synth",
        "blobs",
        "--rows",
        "50",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_line(&out));

    let out = flowml(&[
        "evaluate",
        "--artifact",
        artifact.to_str().unwrap(),
        "--input",
        csv.to_str().unwrap(),
    ]);
    assert_single_error_line(&out, "shape");
}
