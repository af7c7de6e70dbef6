//! Run directories: manifest, metrics stream, snapshot and exploration log.

use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use quantumsea::report::{stable_json, stable_json_pretty};
use quantumsea::tasks::{MetricKind, RunResult, TrainConfig};
use quantumsea::SparsityMask;
use serde::{Deserialize, Serialize};

use crate::exit::{Exit, IO};

pub const MANIFEST: &str = "manifest.json";
pub const METRICS: &str = "metrics.jsonl";
pub const SNAPSHOT: &str = "snapshot.json";
pub const EXPLORATION: &str = "exploration.jsonl";

#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub seed: u64,
    pub config: TrainConfig,
    /// Directory that relative paths in `config` resolve against.
    pub config_dir: PathBuf,
    pub started_unix_s: f64,
    pub finished_unix_s: f64,
    pub wall_time_s: f64,
    pub outputs: Vec<String>,
}

/// Final parameters and topology, enough to rebuild and re-evaluate the circuit.
#[derive(Debug, Serialize, Deserialize)]
pub struct Snapshot {
    pub config: TrainConfig,
    pub config_dir: PathBuf,
    pub params: Vec<f64>,
    pub mask: SparsityMask,
    pub capacity: f64,
    pub metric: MetricKind,
    pub final_metric: f64,
    pub final_metric_noisy: Option<f64>,
    pub train_accuracy: Option<f64>,
}

pub fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

/// Creates `dir` for a new run. An existing manifest is only replaced with
/// `overwrite`, in which case the old artifacts are removed first.
pub fn prepare_run_dir(dir: &Path, overwrite: bool) -> Result<()> {
    if dir.join(MANIFEST).exists() {
        if !overwrite {
            return Err(Exit::error(
                IO,
                format!("{} already holds a run; pass --overwrite to replace it", dir.display()),
            ));
        }
        for name in [MANIFEST, METRICS, SNAPSHOT, EXPLORATION] {
            let path = dir.join(name);
            if path.exists() {
                fs::remove_file(&path).with_context(|| format!("removing {}", path.display()))?;
            }
        }
    }
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    Ok(())
}

pub fn metrics_writer(dir: &Path) -> Result<BufWriter<File>> {
    let path = dir.join(METRICS);
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn write_new(path: &Path, contents: &str) -> Result<()> {
    let mut f = OpenOptions::new()
        .write(true)
        .create_new(true)
        .open(path)
        .with_context(|| format!("creating {}", path.display()))?;
    f.write_all(contents.as_bytes())
        .with_context(|| format!("writing {}", path.display()))
}

/// Writes the snapshot, exploration log and (last) the manifest.
pub fn finish_run(
    dir: &Path,
    config: &TrainConfig,
    config_dir: &Path,
    result: &RunResult,
    started: f64,
) -> Result<()> {
    let snapshot = Snapshot {
        config: config.clone(),
        config_dir: config_dir.to_path_buf(),
        params: result.params.clone(),
        mask: result.mask.clone(),
        capacity: result.capacity,
        metric: result.metric,
        final_metric: result.final_metric,
        final_metric_noisy: result.final_metric_noisy,
        train_accuracy: result.train_accuracy,
    };
    write_new(&dir.join(SNAPSHOT), &(stable_json_pretty(&snapshot)? + "\n"))?;

    let mut exploration = String::new();
    for event in &result.log.events {
        exploration.push_str(&stable_json(event)?);
        exploration.push('\n');
    }
    write_new(&dir.join(EXPLORATION), &exploration)?;

    let manifest = Manifest {
        tool: "qsea".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        seed: config.seed,
        config: config.clone(),
        config_dir: config_dir.to_path_buf(),
        started_unix_s: started,
        finished_unix_s: unix_now(),
        wall_time_s: result.wall_time_s,
        outputs: [METRICS, SNAPSHOT, EXPLORATION].map(String::from).to_vec(),
    };
    write_new(&dir.join(MANIFEST), &(stable_json_pretty(&manifest)? + "\n"))
}

pub fn read_snapshot(run: &Path) -> Result<Snapshot> {
    let path = run.join(SNAPSHOT);
    let text = fs::read_to_string(&path)
        .map_err(|e| Exit::error(IO, format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}
