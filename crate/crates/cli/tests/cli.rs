use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const VQE: &str = r#"
template = "rxyz"
n_blocks = 2
total_iterations = 40
method = "sea"
sparsity = 0.5
delta_t = 2
seed = 3

[task]
kind = "vqe"
hamiltonian = "h2"
"#;

const QML: &str = r#"
template = "rxyz"
n_blocks = 2
total_iterations = 20
method = "sea"
sparsity = 0.5
delta_t = 4
batch_size = 8

[task]
kind = "qml"
dataset = "synth:two_class_16"
n_per_class = 10
"#;

fn qsea(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsea")).args(args).output().expect("spawn qsea")
}

fn ok(args: &[&str]) -> String {
    let out = qsea(args);
    assert!(
        out.status.success(),
        "qsea {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read(p: &Path) -> String {
    fs::read_to_string(p).unwrap()
}

fn snapshot(run: &Path) -> Value {
    serde_json::from_str(&read(&run.join("snapshot.json"))).unwrap()
}

#[test]
fn train_writes_all_artifacts() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "vqe.toml", VQE);
    let run = tmp.path().join("run");
    ok(&["train", "--config", &cfg, "--out", s(&run)]);
    for f in ["manifest.json", "metrics.jsonl", "snapshot.json", "exploration.jsonl"] {
        assert!(run.join(f).is_file(), "missing {f}");
    }
    let metrics = read(&run.join("metrics.jsonl"));
    assert_eq!(metrics.lines().count(), 40);
    let last: Value = serde_json::from_str(metrics.lines().last().unwrap()).unwrap();
    assert_eq!(last["iteration"], 40);
    let manifest: Value = serde_json::from_str(&read(&run.join("manifest.json"))).unwrap();
    assert_eq!(manifest["seed"], 3);
    assert!(manifest["wall_time_s"].as_f64().unwrap() >= 0.0);
}

#[test]
fn same_seed_gives_identical_metrics() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "qml.toml", QML);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    ok(&["train", "--config", &cfg, "--seed", "7", "--out", s(&a)]);
    ok(&["--jobs", "1", "train", "--config", &cfg, "--seed", "7", "--out", s(&b)]);
    assert_eq!(read(&a.join("metrics.jsonl")), read(&b.join("metrics.jsonl")));
    assert_eq!(read(&a.join("snapshot.json")), read(&b.join("snapshot.json")));
}

#[test]
fn noisy_training_is_reproducible() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "vqe.toml", VQE);
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for dir in [&a, &b] {
        ok(&["train", "--config", &cfg, "--noise-preset", "santiago_like", "--out", s(dir)]);
    }
    assert_eq!(read(&a.join("metrics.jsonl")), read(&b.join("metrics.jsonl")));
    assert!(snapshot(&a)["final_metric_noisy"].is_number());
}

#[test]
fn existing_run_is_not_overwritten() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "vqe.toml", VQE);
    let run = tmp.path().join("run");
    ok(&["train", "--config", &cfg, "--out", s(&run)]);
    let before = read(&run.join("metrics.jsonl"));
    let out = qsea(&["train", "--config", &cfg, "--seed", "9", "--out", s(&run)]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--overwrite"));
    assert_eq!(read(&run.join("metrics.jsonl")), before);
    ok(&["train", "--config", &cfg, "--seed", "9", "--out", s(&run), "--overwrite"]);
    assert_ne!(read(&run.join("metrics.jsonl")), before);
}

#[test]
fn config_errors_exit_with_code_two() {
    let tmp = TempDir::new().unwrap();
    let unknown = write_config(tmp.path(), "unknown.toml", &format!("learning_rate = 0.1\n{VQE}"));
    let out = qsea(&["train", "--config", &unknown, "--out", s(&tmp.path().join("x"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("learning_rate"));

    let bad = write_config(tmp.path(), "bad.toml", &VQE.replace("sparsity = 0.5", "sparsity = 1.5"));
    let out = qsea(&["train", "--config", &bad, "--out", s(&tmp.path().join("y"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sparsity"));

    let out = qsea(&["train", "--config", s(&tmp.path().join("absent.toml"))]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn dump_config_round_trips() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "vqe.toml", VQE);
    let dumped = ok(&["train", "--config", &cfg, "--seed", "11", "--dump-config"]);
    assert!(dumped.contains("seed = 11"));
    assert!(dumped.contains("prune = \"salience\""));
    let again = write_config(tmp.path(), "dumped.toml", &dumped);
    assert_eq!(ok(&["train", "--config", &again, "--dump-config"]), dumped);
}

#[test]
fn eval_reproduces_recorded_metric() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "vqe.toml", VQE);
    let run = tmp.path().join("run");
    ok(&["train", "--config", &cfg, "--out", s(&run)]);
    let recorded = snapshot(&run)["final_metric"].as_f64().unwrap();
    let out = ok(&[
        "--format",
        "records",
        "eval",
        "--run",
        s(&run),
        "--noise-preset",
        "santiago_like",
        "--seed",
        "1,2",
    ]);
    let rows: Vec<Value> = out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 3);
    assert!((rows[0]["value"].as_f64().unwrap() - recorded).abs() < 1e-9);
    assert_eq!(rows[1]["seed"], 1);
    assert_eq!(rows[2]["seed"], 2);
    let again = ok(&["--format", "records", "eval", "--run", s(&run), "--noise-preset", "santiago_like", "--seed", "1,2"]);
    assert_eq!(out, again);
}

#[test]
fn eval_rejects_mismatched_inputs() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "vqe.toml", VQE);
    let run = tmp.path().join("run");
    ok(&["train", "--config", &cfg, "--out", s(&run)]);
    let csv = tmp.path().join("d.csv");
    fs::write(&csv, "0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,0,1\n").unwrap();
    let out = qsea(&["eval", "--run", s(&run), "--dataset", s(&csv)]);
    assert_eq!(out.status.code(), Some(3));
    let out = qsea(&["eval", "--run", s(&tmp.path().join("nope"))]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn inspect_template_counts_gates() {
    let out = ok(&["--format", "records", "inspect", "--template", "rxyz", "--blocks", "8", "--qubits", "4"]);
    let report: Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(report["stats"]["rotation_gates"], 96);
    assert_eq!(report["stats"]["gate_counts"]["CZ"], 32);
    assert_eq!(report["implicit_capacity"], 0.0);
}

#[test]
fn inspect_run_reports_capacity() {
    let tmp = TempDir::new().unwrap();
    let moving = write_config(tmp.path(), "vqe.toml", VQE);
    let frozen = write_config(tmp.path(), "static.toml", &VQE.replace("\"sea\"", "\"static\""));
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    ok(&["train", "--config", &moving, "--out", s(&a)]);
    ok(&["train", "--config", &frozen, "--out", s(&b)]);
    let report = |dir: &Path| -> Value {
        serde_json::from_str(ok(&["--format", "records", "inspect", "--run", s(dir)]).trim()).unwrap()
    };
    let ra = report(&a);
    assert!(ra["implicit_capacity"].as_f64().unwrap() > 0.0);
    assert_eq!(ra["active_params"], 6);
    assert_eq!(report(&b)["implicit_capacity"], 0.0);
}

#[test]
fn ablate_rows_and_cells_match_train() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "vqe.toml", VQE);
    let out = tmp.path().join("abl");
    ok(&[
        "ablate", "--config", &cfg, "--axis", "delta-t", "--values", "1,2,5,10", "--seeds", "1", "--out", s(&out),
    ]);
    let csv = read(&out.join("summary.csv"));
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.lines().nth(1).unwrap().starts_with("delta_t,1,"));
    assert_eq!(read(&out.join("summary.jsonl")).lines().count(), 4);

    let run = tmp.path().join("run");
    ok(&["train", "--config", &cfg, "--out", s(&run)]);
    let cell = out.join("cells").join("delta_t=2").join("seed-3");
    assert_eq!(read(&cell.join("metrics.jsonl")), read(&run.join("metrics.jsonl")));

    let again = qsea(&["ablate", "--config", &cfg, "--axis", "delta-t", "--values", "1", "--seeds", "1", "--out", s(&out)]);
    assert_eq!(again.status.code(), Some(4));
}

#[test]
fn ablate_rejects_bad_values() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(tmp.path(), "vqe.toml", VQE);
    let out = qsea(&[
        "ablate",
        "--config",
        &cfg,
        "--axis",
        "prune-criterion",
        "--values",
        "coin_flip",
        "--out",
        s(&tmp.path().join("abl")),
    ]);
    assert_eq!(out.status.code(), Some(2));
}
