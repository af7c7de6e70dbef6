//! Datasets, Hamiltonians, losses, optimizers and the training loop.

mod config;
mod dataset;
mod hamiltonian;
mod loss;
mod optim;
mod train;

pub use config::{resolve_noise, Method, NoiseMode, Task, TaskSpec, TrainConfig};
pub use dataset::{load_dataset, parse_dataset, synth_dataset, synth_dataset_with_sigma, Dataset, SynthKind};
pub use hamiltonian::{exact_ground_energy, Hamiltonian};
pub use loss::{argmax, qml_loss, softmax, LossSpec};
pub use optim::{LrSchedule, Optimizer, OptimizerKind, WEIGHT_DECAY};
pub use train::{
    accuracy, build_circuit, class_readout, initial_mask, task_gradient, task_metric, train, train_quiet,
    vqe_energy, IterationView, MetricKind, MetricRecord, RunResult,
};
