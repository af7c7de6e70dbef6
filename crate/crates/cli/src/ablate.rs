use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use quantumsea::report::{round_sig, stable_json, SIG_DIGITS};
use quantumsea::tasks::TrainConfig;
use quantumsea::{GrowCriterion, PruneCriterion};
use rayon::prelude::*;
use serde::Serialize;

use crate::exit::{Exit, CONFIG, IO};
use crate::train::{apply_noise_override, load_config, train_into};
use crate::{AblateArgs, Axis, Format};

const SUMMARY: &str = "summary.csv";

impl Axis {
    fn name(self) -> &'static str {
        match self {
            Axis::PruneCriterion => "prune_criterion",
            Axis::GrowCriterion => "grow_criterion",
            Axis::DeltaT => "delta_t",
            Axis::Sparsity => "sparsity",
        }
    }

    /// `base` with this axis set to `value`.
    fn apply(self, base: &TrainConfig, value: &str) -> Result<TrainConfig> {
        let mut c = base.clone();
        let bad = |e: String| Exit::error(CONFIG, format!("{}: {e}", self.name()));
        match self {
            Axis::PruneCriterion => c.prune = value.parse::<PruneCriterion>().map_err(|e| bad(e.to_string()))?,
            Axis::GrowCriterion => c.grow = value.parse::<GrowCriterion>().map_err(|e| bad(e.to_string()))?,
            Axis::DeltaT => c.delta_t = value.parse().map_err(|_| bad(format!("bad interval {value:?}")))?,
            Axis::Sparsity => c.sparsity = value.parse().map_err(|_| bad(format!("bad sparsity {value:?}")))?,
        }
        c.validate().map_err(|e| bad(e.to_string()))?;
        Ok(c)
    }
}

#[derive(Serialize)]
struct Row {
    axis: &'static str,
    value: String,
    metric: String,
    n_seeds: usize,
    n_ok: usize,
    mean: Option<f64>,
    std: Option<f64>,
    capacity_mean: Option<f64>,
    failures: Vec<String>,
}

fn mean_std(xs: &[f64]) -> (Option<f64>, Option<f64>) {
    if xs.is_empty() {
        return (None, None);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() > 1 {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (Some(mean), Some(var.sqrt()))
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or(String::new(), |v| format!("{}", round_sig(v, SIG_DIGITS)))
}

pub fn run(args: &AblateArgs, format: Format) -> Result<()> {
    let (mut base, config_dir) = load_config(&args.config)?;
    apply_noise_override(&mut base, args.noise_preset.as_deref());
    if args.seeds == 0 {
        return Err(Exit::error(CONFIG, "seeds: need at least one seed per cell"));
    }
    let first_seed = args.seed.unwrap_or(base.seed);
    let configs: Vec<(String, TrainConfig)> = args
        .values
        .iter()
        .map(|v| Ok((v.clone(), args.axis.apply(&base, v)?)))
        .collect::<Result<_>>()?;

    let out = args.out.clone().unwrap_or_else(|| PathBuf::from(format!("ablate-{}", args.axis.name())));
    if out.join(SUMMARY).exists() && !args.overwrite {
        return Err(Exit::error(
            IO,
            format!("{} already holds an ablation; pass --overwrite to replace it", out.display()),
        ));
    }
    fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;

    let cells: Vec<(usize, u64)> = (0..configs.len())
        .flat_map(|row| (0..args.seeds).map(move |k| (row, first_seed + k)))
        .collect();
    let results: Vec<Result<(f64, f64, String)>> = cells
        .par_iter()
        .map(|&(row, seed)| {
            let (value, config) = &configs[row];
            let mut config = config.clone();
            config.seed = seed;
            let dir = out.join("cells").join(format!("{}={value}", args.axis.name())).join(format!("seed-{seed}"));
            let r = train_into(&config, &config_dir, &dir, args.overwrite, None)?;
            Ok((r.headline_metric(), r.capacity, r.metric.name().to_string()))
        })
        .collect();

    let mut rows = Vec::with_capacity(configs.len());
    for (row, (value, _)) in configs.iter().enumerate() {
        let mut metrics = Vec::new();
        let mut caps = Vec::new();
        let mut failures = Vec::new();
        let mut metric = String::from("metric");
        for ((_, seed), r) in cells.iter().zip(&results).filter(|((r, _), _)| *r == row) {
            match r {
                Ok((m, cap, name)) => {
                    metrics.push(*m);
                    caps.push(*cap);
                    metric.clone_from(name);
                }
                Err(e) => failures.push(format!("seed {seed}: {e:#}")),
            }
        }
        let (mean, std) = mean_std(&metrics);
        rows.push(Row {
            axis: args.axis.name(),
            value: value.clone(),
            metric,
            n_seeds: args.seeds as usize,
            n_ok: metrics.len(),
            mean,
            std,
            capacity_mean: mean_std(&caps).0,
            failures,
        });
    }

    let mut csv = String::from("axis,value,metric,n_seeds,n_ok,mean,std,capacity_mean,failures\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            r.axis,
            r.value,
            r.metric,
            r.n_seeds,
            r.n_ok,
            fmt_opt(r.mean),
            fmt_opt(r.std),
            fmt_opt(r.capacity_mean),
            r.failures.len()
        ));
    }
    let path = out.join(SUMMARY);
    fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?;
    let mut jsonl = String::new();
    for r in &rows {
        jsonl.push_str(&stable_json(r)?);
        jsonl.push('\n');
    }
    let path = out.join("summary.jsonl");
    fs::write(&path, &jsonl).with_context(|| format!("writing {}", path.display()))?;

    match format {
        Format::Records => print!("{jsonl}"),
        Format::Human => {
            println!("{:<18} {:>8} {:>14} {:>12} {:>8}", args.axis.name(), "ok", "mean", "std", "I");
            for r in &rows {
                println!(
                    "{:<18} {:>3}/{:<4} {:>14} {:>12} {:>8}",
                    r.value,
                    r.n_ok,
                    r.n_seeds,
                    r.mean.map_or("-".into(), |m| format!("{m:.6}")),
                    r.std.map_or("-".into(), |s| format!("{s:.6}")),
                    r.capacity_mean.map_or("-".into(), |c| format!("{c:.3}")),
                );
                for f in &r.failures {
                    println!("    failed {f}");
                }
            }
            println!("summary: {}", out.join(SUMMARY).display());
        }
    }
    Ok(())
}
