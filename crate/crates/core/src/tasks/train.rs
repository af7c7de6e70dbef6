use std::time::Instant;

use rand::seq::index;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{Method, Task, TrainConfig};
use super::dataset::Dataset;
use super::hamiltonian::Hamiltonian;
use super::loss::{argmax, LossSpec};
use super::optim::{LrSchedule, Optimizer};
use crate::circuit::{build_template, forward, Circuit, MeasurementSpec};
use crate::error::{Error, Result};
use crate::grad::{loss_and_grad_batch, GradientVector};
use crate::noise::{iteration_seed, noisy_forward_seeded, NoiseModel};
use crate::rng::{stream, stream_rng};
use crate::sparse::{
    implicit_capacity, init_mask, prune_grow_update, ExplorationLog, GradAccumulator, SparsityMask, UpdateEvent,
    UpdateSchedule,
};

/// Per-iteration training record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub iteration: usize,
    /// Mini-batch loss at the parameters entering the iteration (the energy
    /// for VQE).
    pub loss: f64,
    /// Mini-batch accuracy (classification only).
    pub accuracy: Option<f64>,
    /// Validation accuracy on `eval_every` iterations.
    pub valid_accuracy: Option<f64>,
    pub active: usize,
    pub block_active: Vec<usize>,
    pub capacity: f64,
    pub lr: f64,
    /// Growth exploration weight, on topology-update iterations.
    pub kappa: Option<f64>,
    pub update: bool,
}

/// What the sink sees after every iteration.
pub struct IterationView<'a> {
    pub record: &'a MetricRecord,
    pub params: &'a [f64],
    pub mask: &'a SparsityMask,
    pub event: Option<&'a UpdateEvent>,
    /// Parameters before this iteration's change.
    pub params_before: &'a [f64],
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Energy,
    Accuracy,
}

impl MetricKind {
    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Energy => "energy",
            MetricKind::Accuracy => "accuracy",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunResult {
    pub params: Vec<f64>,
    pub mask: SparsityMask,
    pub metrics: Vec<MetricRecord>,
    pub log: ExplorationLog,
    pub capacity: f64,
    pub metric: MetricKind,
    /// Energy, or accuracy on the test set (validation set without one),
    /// evaluated noiselessly.
    pub final_metric: f64,
    /// The same metric under the run's noise model, averaged over at least
    /// `eval_trajectories` trajectories.
    pub final_metric_noisy: Option<f64>,
    /// Noiseless accuracy on the training rows.
    pub train_accuracy: Option<f64>,
    pub wall_time_s: f64,
}

impl RunResult {
    pub fn initial_loss(&self) -> f64 {
        self.metrics.first().map_or(f64::NAN, |m| m.loss)
    }

    pub fn final_loss(&self) -> f64 {
        self.metrics.last().map_or(f64::NAN, |m| m.loss)
    }

    /// The noisy metric when the run had a noise model, else the noiseless one.
    pub fn headline_metric(&self) -> f64 {
        self.final_metric_noisy.unwrap_or(self.final_metric)
    }
}

/// Measurement head for a classification task with `n_classes` outputs.
pub fn class_readout(n_classes: usize, n_qubits: usize) -> Result<MeasurementSpec> {
    match n_classes {
        2 => Ok(MeasurementSpec::two_class_pairs(n_qubits)),
        k if k == n_qubits => Ok(MeasurementSpec::per_qubit_z()),
        k => Err(Error::Config(format!("{k} classes cannot be read out from {n_qubits} qubits"))),
    }
}

/// The circuit `config` describes, sized for `task`.
pub fn build_circuit(config: &TrainConfig, task: &Task) -> Result<Circuit> {
    match task {
        Task::Vqe { hamiltonian } => build_template(config.template, hamiltonian.n_qubits(), config.n_blocks)?
            .with_measurement(MeasurementSpec::hamiltonian(hamiltonian.clone())),
        Task::Qml { train, .. } => build_template(config.template, 4, config.n_blocks)?
            .with_encoder(train.encoder)?
            .with_measurement(class_readout(train.n_classes, 4)?),
    }
}

/// The starting mask for `config`.
pub fn initial_mask(config: &TrainConfig, circuit: &Circuit) -> Result<SparsityMask> {
    match config.method {
        Method::Dense => Ok(SparsityMask::dense(circuit)),
        Method::Static | Method::Sea => init_mask(circuit, &[config.sparsity], config.seed),
    }
}

/// `Σ c_i <P_i>` of the state the circuit prepares, optionally under noise.
pub fn vqe_energy(
    circuit: &Circuit,
    params: &[f64],
    mask: &SparsityMask,
    h: &Hamiltonian,
    model: Option<&NoiseModel>,
) -> Result<f64> {
    if h.n_qubits() != circuit.n_qubits() {
        return Err(Error::Shape(format!(
            "Hamiltonian on {} qubits, circuit has {}",
            h.n_qubits(),
            circuit.n_qubits()
        )));
    }
    let c = circuit.clone().with_measurement(MeasurementSpec::hamiltonian(h.clone()))?;
    let outputs = match model {
        Some(m) => noisy_forward_seeded(&c, &[], params, mask, m, m.seed)?,
        None => forward(&c, &[], params, mask)?,
    };
    Ok(h.coefficients().iter().zip(&outputs).map(|(c, o)| c * o).sum())
}

/// Fraction of `data` classified correctly.
pub fn accuracy(
    circuit: &Circuit,
    params: &[f64],
    mask: &SparsityMask,
    data: &Dataset,
    model: Option<&NoiseModel>,
) -> Result<f64> {
    let hits: Vec<bool> = (0..data.len())
        .into_par_iter()
        .map(|i| {
            let x = &data.features[i];
            let scores = match model {
                Some(m) => noisy_forward_seeded(circuit, x, params, mask, m, m.seed)?,
                None => forward(circuit, x, params, mask)?,
            };
            Ok(argmax(&scores) == data.labels[i])
        })
        .collect::<Result<_>>()?;
    Ok(hits.iter().filter(|&&h| h).count() as f64 / data.len().max(1) as f64)
}

/// The task's headline metric for a trained circuit: energy for VQE, test
/// (or validation) accuracy for classification.
pub fn task_metric(
    circuit: &Circuit,
    params: &[f64],
    mask: &SparsityMask,
    task: &Task,
    model: Option<&NoiseModel>,
) -> Result<f64> {
    match task {
        Task::Vqe { hamiltonian } => vqe_energy(circuit, params, mask, hamiltonian, model),
        Task::Qml { valid, test, .. } => accuracy(circuit, params, mask, test.as_ref().unwrap_or(valid), model),
    }
}

fn initial_params(config: &TrainConfig, mask: &SparsityMask) -> Vec<f64> {
    let mut rng = stream_rng(config.seed, stream::PARAM_INIT, 0);
    let r = config.init_range;
    (0..mask.len())
        .map(|s| {
            let v = if r > 0.0 { rng.random_range(-r..=r) } else { 0.0 };
            if mask.is_active(s) {
                v
            } else {
                0.0
            }
        })
        .collect()
}

/// Rows of iteration `t`'s mini-batch.
fn batch_rows(config: &TrainConfig, n_rows: usize, t: usize) -> Vec<usize> {
    if config.batch_size >= n_rows {
        return (0..n_rows).collect();
    }
    let mut rng = stream_rng(config.seed, stream::BATCH, t as u64);
    let mut rows = index::sample(&mut rng, n_rows, config.batch_size).into_vec();
    rows.sort_unstable();
    rows
}

/// Runs the prune-and-grow training loop (or its dense / static baselines).
///
/// Iterations are numbered `1..=total_iterations`. Each one evaluates the
/// mini-batch loss and parameter-shift gradient; update iterations then
/// change the topology, all others take an optimizer step and fold the
/// gradient into the accumulator.
pub fn train(
    config: &TrainConfig,
    task: &Task,
    model: Option<&NoiseModel>,
    sink: &mut dyn FnMut(&IterationView<'_>) -> Result<()>,
) -> Result<RunResult> {
    config.validate()?;
    if let Some(m) = model {
        m.validate()?;
    }
    let start = Instant::now();
    let circuit = build_circuit(config, task)?;
    let n = circuit.n_params();
    let mut mask = initial_mask(config, &circuit)?;
    let mut params = initial_params(config, &mask);
    let mut log = ExplorationLog::new(&mask);
    let mut acc = GradAccumulator::new(n, config.tau)?;
    let mut optimizer = Optimizer::new(config.optimizer, n);
    let lr_schedule = LrSchedule {
        kind: config.optimizer,
        lr_start: config.lr_start,
        lr_end: config.lr_end,
        total: config.total_iterations,
        warmup: config.warmup_iterations(),
    };
    let schedule = match config.method {
        Method::Sea => Some(UpdateSchedule::new(config.delta_t, config.t_end(), config.gamma)?),
        _ => None,
    };

    let vqe_loss = match task {
        Task::Vqe { hamiltonian } => Some(LossSpec::Energy {
            coefficients: hamiltonian.coefficients(),
        }),
        Task::Qml { .. } => None,
    };
    let mut metrics = Vec::with_capacity(config.total_iterations);
    for t in 1..=config.total_iterations {
        let (batch, labels): (Vec<(&[f64], LossSpec)>, Vec<usize>) = match task {
            Task::Vqe { .. } => (vec![(&[][..], vqe_loss.clone().expect("vqe loss"))], Vec::new()),
            Task::Qml { train, .. } => batch_rows(config, train.len(), t)
                .into_iter()
                .map(|r| {
                    let target = train.labels[r];
                    ((train.features[r].as_slice(), LossSpec::CrossEntropy { target }), target)
                })
                .unzip(),
        };
        let step_seed = model.map_or(0, |m| iteration_seed(m, config.seed, t as u64));
        let bg = loss_and_grad_batch(&circuit, &batch, &params, &mask, model, step_seed)?;
        let batch_accuracy = (!labels.is_empty()).then(|| {
            let hits = bg.outputs.iter().zip(&labels).filter(|(o, &l)| argmax(o) == l).count();
            hits as f64 / labels.len() as f64
        });
        let params_before = params.clone();
        let lr = lr_schedule.lr(t);
        let mut event = None;
        match &schedule {
            Some(s) if s.is_update(t) => {
                let e = prune_grow_update(
                    &mut mask,
                    &mut params,
                    &bg.grad,
                    &acc,
                    t,
                    s,
                    config.prune,
                    config.grow,
                    config.seed,
                    &mut log,
                )?;
                optimizer.reset(e.pruned.iter().chain(&e.grown).copied());
                event = Some(e);
            }
            _ => {
                optimizer.step(&mut params, &bg.grad.values, &mask, lr);
                if config.method == Method::Sea {
                    acc.update(&bg.grad, &mask)?;
                }
            }
        }
        let valid_accuracy = match task {
            Task::Qml { valid, .. } if config.eval_every > 0 && t % config.eval_every == 0 => {
                Some(accuracy(&circuit, &params, &mask, valid, None)?)
            }
            _ => None,
        };
        let record = MetricRecord {
            iteration: t,
            loss: bg.loss,
            accuracy: batch_accuracy,
            valid_accuracy,
            active: mask.active_count(),
            block_active: mask.block_active_counts(),
            capacity: implicit_capacity(&log, &mask),
            lr,
            kappa: event.as_ref().map(|e| e.kappa),
            update: event.is_some(),
        };
        sink(&IterationView {
            record: &record,
            params: &params,
            mask: &mask,
            event: event.as_ref(),
            params_before: &params_before,
        })?;
        metrics.push(record);
    }

    let final_metric = task_metric(&circuit, &params, &mask, task, None)?;
    let final_metric_noisy = model
        .filter(|m| !m.is_trivial(circuit.n_qubits()))
        .map(|m| {
            let mut eval_model = m.clone();
            eval_model.n_trajectories = m.n_trajectories.max(config.eval_trajectories);
            task_metric(&circuit, &params, &mask, task, Some(&eval_model))
        })
        .transpose()?;
    let train_accuracy = match task {
        Task::Qml { train, .. } => Some(accuracy(&circuit, &params, &mask, train, None)?),
        Task::Vqe { .. } => None,
    };
    Ok(RunResult {
        capacity: implicit_capacity(&log, &mask),
        params,
        mask,
        metrics,
        log,
        metric: match task {
            Task::Vqe { .. } => MetricKind::Energy,
            Task::Qml { .. } => MetricKind::Accuracy,
        },
        final_metric,
        final_metric_noisy,
        train_accuracy,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// [`train`] without a sink.
pub fn train_quiet(config: &TrainConfig, task: &Task, model: Option<&NoiseModel>) -> Result<RunResult> {
    train(config, task, model, &mut |_| Ok(()))
}

/// Gradient of the task loss at `params`, for inspection.
pub fn task_gradient(
    circuit: &Circuit,
    params: &[f64],
    mask: &SparsityMask,
    task: &Task,
) -> Result<GradientVector> {
    let batch: Vec<(&[f64], LossSpec)> = match task {
        Task::Vqe { hamiltonian } => vec![(
            &[][..],
            LossSpec::Energy {
                coefficients: hamiltonian.coefficients(),
            },
        )],
        Task::Qml { train, .. } => train
            .features
            .iter()
            .zip(&train.labels)
            .map(|(x, &target)| (x.as_slice(), LossSpec::CrossEntropy { target }))
            .collect(),
    };
    Ok(loss_and_grad_batch(circuit, &batch, params, mask, None, 0)?.grad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::TemplateKind;
    use crate::tasks::config::TaskSpec;
    use crate::tasks::exact_ground_energy;
    use std::path::Path;

    fn vqe_config(method: Method, iters: usize) -> TrainConfig {
        let mut c = TrainConfig::new(
            TaskSpec::Vqe {
                hamiltonian: "h2".into(),
            },
            TemplateKind::Rxyz,
            2,
            iters,
        );
        c.method = method;
        c.delta_t = 5;
        c
    }

    fn load(c: &TrainConfig) -> Task {
        Task::load(&c.task, Path::new("."), c.seed).unwrap()
    }

    #[test]
    fn identity_and_empty_circuit_energies() {
        let c = Circuit::new(2, 1, vec![], MeasurementSpec::per_qubit_z()).unwrap();
        let mask = SparsityMask::dense(&c);
        let ii: Hamiltonian = "1.0 II".parse().unwrap();
        let zz: Hamiltonian = "1.0 ZZ".parse().unwrap();
        assert!((vqe_energy(&c, &[], &mask, &ii, None).unwrap() - 1.0).abs() < 1e-12);
        assert!((vqe_energy(&c, &[], &mask, &zz, None).unwrap() - 1.0).abs() < 1e-12);
        let z: Hamiltonian = "1.0 Z".parse().unwrap();
        assert!(matches!(vqe_energy(&c, &[], &mask, &z, None), Err(Error::Shape(_))));
    }

    #[test]
    fn dense_run_never_updates() {
        let c = vqe_config(Method::Dense, 30);
        let r = train_quiet(&c, &load(&c), None).unwrap();
        assert!(r.metrics.iter().all(|m| !m.update && m.active == 12 && m.capacity == 0.0));
        assert!(r.log.events.is_empty());
    }

    #[test]
    fn late_interval_means_no_updates() {
        let mut c = vqe_config(Method::Sea, 20);
        c.delta_t = 15;
        let r = train_quiet(&c, &load(&c), None).unwrap();
        assert!(r.log.events.is_empty());
        assert_eq!(r.capacity, 0.0);
    }

    #[test]
    fn updates_follow_schedule() {
        let c = vqe_config(Method::Sea, 40);
        let r = train_quiet(&c, &load(&c), None).unwrap();
        let at: Vec<usize> = r.metrics.iter().filter(|m| m.update).map(|m| m.iteration).collect();
        assert_eq!(at, vec![5, 10, 15, 20, 25]);
    }

    #[test]
    fn energies_respect_variational_bound() {
        let c = vqe_config(Method::Sea, 40);
        let task = load(&c);
        let Task::Vqe { hamiltonian } = &task else { unreachable!() };
        let e0 = exact_ground_energy(hamiltonian).unwrap();
        let r = train_quiet(&c, &task, None).unwrap();
        assert!(r.metrics.iter().all(|m| m.loss >= e0 - 1e-9));
        assert!(r.final_loss() < r.initial_loss());
    }

    #[test]
    fn reproducible() {
        let mut c = vqe_config(Method::Sea, 25);
        c.mode = crate::tasks::config::NoiseMode::Noisy;
        let task = load(&c);
        let model = c.noise_model(Path::new(".")).unwrap();
        let a = train_quiet(&c, &task, model.as_ref()).unwrap();
        let b = train_quiet(&c, &task, model.as_ref()).unwrap();
        assert_eq!(a.metrics, b.metrics);
        assert_eq!(a.params, b.params);
        assert!(a.final_metric_noisy.is_some());
    }
}
