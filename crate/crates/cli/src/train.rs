use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use quantumsea::report::stable_json;
use quantumsea::tasks::{train, NoiseMode, RunResult, Task, TrainConfig};

use crate::artifacts::{finish_run, metrics_writer, prepare_run_dir, unix_now};
use crate::{Format, TrainArgs};

/// Loads a config and the directory its relative paths resolve against.
pub fn load_config(path: &Path) -> Result<(TrainConfig, PathBuf)> {
    let config = TrainConfig::load(path)?;
    let dir = path
        .parent()
        .map(Path::to_path_buf)
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or_else(|| PathBuf::from("."));
    let dir = dir.canonicalize().with_context(|| format!("resolving {}", dir.display()))?;
    Ok((config, dir))
}

pub fn apply_noise_override(config: &mut TrainConfig, preset: Option<&str>) {
    if let Some(name) = preset {
        config.noise = name.to_string();
        config.mode = NoiseMode::Noisy;
    }
}

/// Trains `config` into `out`, streaming metrics; `echo` mirrors progress to stdout.
pub fn train_into(
    config: &TrainConfig,
    config_dir: &Path,
    out: &Path,
    overwrite: bool,
    echo: Option<Format>,
) -> Result<RunResult> {
    config.validate()?;
    let model = config.noise_model(config_dir)?;
    let task = Task::load(&config.task, config_dir, config.seed)?;
    prepare_run_dir(out, overwrite)?;
    let started = unix_now();
    let mut metrics = metrics_writer(out)?;
    let every = (config.total_iterations / 10).max(1);
    let mut sink = |view: &quantumsea::tasks::IterationView<'_>| -> quantumsea::Result<()> {
        let line = stable_json(view.record)?;
        let io = |e: std::io::Error| quantumsea::Error::io(out, e);
        writeln!(metrics, "{line}").map_err(io)?;
        match echo {
            Some(Format::Records) => println!("{line}"),
            Some(Format::Human) if view.record.iteration.is_multiple_of(every) || view.record.update => {
                let r = view.record;
                let mut msg = format!(
                    "iter {:>5}/{}  loss {:>12.6}  active {:>3}  I {:.3}  lr {:.4}",
                    r.iteration, config.total_iterations, r.loss, r.active, r.capacity, r.lr
                );
                if let Some(e) = view.event {
                    msg.push_str(&format!("  update: -{} +{}", e.pruned.len(), e.grown.len()));
                }
                println!("{msg}");
            }
            _ => {}
        }
        Ok(())
    };
    let result = train(config, &task, model.as_ref(), &mut sink)?;
    metrics.flush().with_context(|| format!("writing metrics in {}", out.display()))?;
    drop(metrics);
    finish_run(out, config, config_dir, &result, started)?;
    Ok(result)
}

pub fn run(args: &TrainArgs, format: Format) -> Result<()> {
    let (mut config, config_dir) = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    apply_noise_override(&mut config, args.noise_preset.as_deref());
    if args.dump_config {
        print!("{}", config.to_toml());
        return Ok(());
    }
    let out = args.out.clone().unwrap_or_else(|| {
        let stem = args.config.file_stem().map_or("run".into(), |s| s.to_string_lossy().into_owned());
        PathBuf::from("runs").join(format!("{stem}-seed{}", config.seed))
    });
    let result = train_into(&config, &config_dir, &out, args.overwrite, Some(format))?;
    if format == Format::Human {
        let name = result.metric.name();
        println!("run directory: {}", out.display());
        println!("final {name} (noiseless): {:.6}", result.final_metric);
        if let Some(noisy) = result.final_metric_noisy {
            println!("final {name} ({}): {noisy:.6}", config.noise);
        }
        if let Some(acc) = result.train_accuracy {
            println!("train accuracy: {acc:.4}");
        }
        println!(
            "active {}/{}  implicit capacity {:.4}  updates {}  wall time {:.2} s",
            result.mask.active_count(),
            result.mask.len(),
            result.capacity,
            result.log.events.len(),
            result.wall_time_s
        );
    }
    Ok(())
}
