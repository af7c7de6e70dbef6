//! Dynamic sparse topology exploration for parameterized quantum circuits.
//!
//! The crate is organised bottom-up:
//!
//! * [`qstate`] dense statevector engine (gates, Pauli expectations, probabilities)
//! * [`circuit`] gate-level IR, the five block templates, input encoders and the
//!   measurement head
//! * [`noise`] stochastic Pauli insertion and readout confusion with trajectory
//!   averaging
//! * [`grad`] parameter-shift gradients and a finite-difference oracle
//! * [`sparse`] masks, cosine-decayed prune/grow updates, the historical gradient
//!   accumulator and implicit capacity
//! * [`tasks`] datasets, Hamiltonians, losses, optimizers and the training loop
//!
//! Basis indices use qubit 0 as the least significant bit. Pauli strings are
//! written with qubit 0 as the rightmost character, the same way kets are.

pub mod circuit;
pub mod config;
pub mod error;
pub mod grad;
pub mod noise;
pub mod qstate;
pub mod report;
pub mod rng;
pub mod sparse;
pub mod tasks;

pub use circuit::{
    build_encoder, build_template, circuit_stats, BlockTag, Circuit, CircuitStats, EncoderKind,
    Gate, GateKind, MeasurementMode, MeasurementSpec, TemplateKind,
};
pub use config::Tolerances;
pub use error::{Error, Result};
pub use grad::{finite_diff_grad, loss_and_grad_batch, param_shift_grad, GradientVector};
pub use noise::{NoiseModel, PauliProbs};
pub use qstate::{GateMatrix, PauliString, StateVector};
pub use sparse::{
    f_decay, implicit_capacity, init_mask, prune_grow_update, ExplorationLog, GradAccumulator,
    GrowCriterion, PruneCriterion, SparsityMask, UpdateEvent, UpdateSchedule,
};
pub use tasks::{
    exact_ground_energy, qml_loss, train, vqe_energy, Dataset, Hamiltonian, LossSpec, RunResult,
    TrainConfig,
};
