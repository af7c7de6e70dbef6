use anyhow::Result;
use quantumsea::report::stable_json;
use quantumsea::tasks::{build_circuit, load_dataset, resolve_noise, task_metric, Hamiltonian, Task};
use quantumsea::Error;
use serde::Serialize;

use crate::artifacts::read_snapshot;
use crate::{EvalArgs, Format};

#[derive(Serialize)]
struct EvalRecord<'a> {
    metric: &'a str,
    noise: &'a str,
    seed: Option<u64>,
    value: f64,
}

pub fn run(args: &EvalArgs, format: Format) -> Result<()> {
    let snap = read_snapshot(&args.run)?;
    let config = &snap.config;
    let mut task = Task::load(&config.task, &snap.config_dir, config.seed)?;
    match (&mut task, &args.dataset, &args.hamiltonian) {
        (Task::Qml { test, train, .. }, Some(path), None) => {
            let data = load_dataset(path, train.encoder)?;
            if data.n_classes > train.n_classes {
                return Err(Error::Validation(format!(
                    "{} has {} classes, the circuit reads out {}",
                    path.display(),
                    data.n_classes,
                    train.n_classes
                ))
                .into());
            }
            *test = Some(data);
        }
        (Task::Vqe { hamiltonian }, None, Some(path)) => *hamiltonian = Hamiltonian::load(path)?,
        (_, None, None) => {}
        (Task::Qml { .. }, _, Some(_)) => {
            return Err(Error::Validation("a Hamiltonian cannot be evaluated on a classification run".into()).into())
        }
        (Task::Vqe { .. }, Some(_), _) => {
            return Err(Error::Validation("a dataset cannot be evaluated on a VQE run".into()).into())
        }
    }
    let circuit = build_circuit(config, &task)?;
    if snap.params.len() != circuit.n_params() || snap.mask.len() != circuit.n_params() {
        return Err(Error::Validation(format!(
            "snapshot has {} parameters, the circuit for this task has {}",
            snap.params.len(),
            circuit.n_params()
        ))
        .into());
    }
    let metric = snap.metric.name();
    let mut rows = vec![(
        "noiseless".to_string(),
        None,
        task_metric(&circuit, &snap.params, &snap.mask, &task, None)?,
    )];
    if let Some(name) = &args.noise_preset {
        let base = resolve_noise(name, &snap.config_dir)?;
        let seeds = if args.seed.is_empty() { vec![base.seed] } else { args.seed.clone() };
        for seed in seeds {
            let mut model = base.clone();
            model.seed = seed;
            let value = task_metric(&circuit, &snap.params, &snap.mask, &task, Some(&model))?;
            rows.push((name.clone(), Some(seed), value));
        }
    }
    for (noise, seed, value) in &rows {
        match format {
            Format::Records => println!(
                "{}",
                stable_json(&EvalRecord {
                    metric,
                    noise,
                    seed: *seed,
                    value: *value,
                })?
            ),
            Format::Human => match seed {
                Some(s) => println!("{metric} ({noise}, seed {s}): {value:.9}"),
                None => println!("{metric} ({noise}): {value:.9}"),
            },
        }
    }
    Ok(())
}
