use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::dataset::{load_dataset, synth_dataset, Dataset, SynthKind};
use super::hamiltonian::Hamiltonian;
use super::optim::OptimizerKind;
use crate::circuit::{EncoderKind, TemplateKind};
use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::sparse::{GrowCriterion, PruneCriterion};

/// What the circuit is trained to do.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TaskSpec {
    /// Minimize `<H>`. `hamiltonian` is `"h2"` for the bundled molecule or a
    /// path to a term file.
    Vqe { hamiltonian: String },
    /// Classify. `dataset` is `"synth:two_class_16"`, `"synth:four_class_16"`
    /// or a CSV path; 20% of it is held out for validation.
    Qml {
        dataset: String,
        #[serde(default = "default_n_per_class")]
        n_per_class: usize,
        #[serde(default = "default_encoder")]
        encoder: EncoderKind,
        /// Optional held-out CSV reported as the final metric.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        test_dataset: Option<String>,
    },
}

fn default_n_per_class() -> usize {
    100
}

fn default_encoder() -> EncoderKind {
    EncoderKind::Image16
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseMode {
    Noisefree,
    Noisy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Every slot active, no topology updates.
    Dense,
    /// A fixed random mask.
    Static,
    /// Prune-and-grow exploration.
    Sea,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Dense => "dense",
            Method::Static => "static",
            Method::Sea => "sea",
        }
    }
}

/// One training run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrainConfig {
    pub task: TaskSpec,
    pub template: TemplateKind,
    pub n_blocks: usize,
    #[serde(default = "default_mode")]
    pub mode: NoiseMode,
    /// Preset name or TOML path; used in noisy mode.
    #[serde(default = "default_noise")]
    pub noise: String,
    #[serde(default = "default_optimizer")]
    pub optimizer: OptimizerKind,
    #[serde(default = "default_lr_start")]
    pub lr_start: f64,
    #[serde(default = "default_lr_end")]
    pub lr_end: f64,
    /// Share of iterations spent on the Adam warmup ramp.
    #[serde(default = "default_warmup")]
    pub warmup_fraction: f64,
    pub total_iterations: usize,
    #[serde(default = "default_method")]
    pub method: Method,
    /// Target sparsity of every block (static and sea).
    #[serde(default = "default_sparsity")]
    pub sparsity: f64,
    #[serde(default = "default_delta_t")]
    pub delta_t: usize,
    #[serde(default = "default_exploration")]
    pub exploration_fraction: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default = "default_prune")]
    pub prune: PruneCriterion,
    #[serde(default = "default_grow")]
    pub grow: GrowCriterion,
    #[serde(default = "default_batch")]
    pub batch_size: usize,
    /// Initial angles are drawn from `U(-init_range, init_range)`.
    #[serde(default = "default_init_range")]
    pub init_range: f64,
    /// Trajectories for the final noisy metric (at least the model's own).
    #[serde(default = "default_eval_trajectories")]
    pub eval_trajectories: usize,
    /// Validation accuracy is recorded every `eval_every` iterations (0: never).
    #[serde(default)]
    pub eval_every: usize,
    #[serde(default)]
    pub seed: u64,
}

fn default_mode() -> NoiseMode {
    NoiseMode::Noisefree
}
fn default_noise() -> String {
    "santiago_like".into()
}
fn default_optimizer() -> OptimizerKind {
    OptimizerKind::SgdCosine
}
fn default_lr_start() -> f64 {
    0.3
}
fn default_lr_end() -> f64 {
    0.03
}
fn default_warmup() -> f64 {
    0.15
}
fn default_method() -> Method {
    Method::Sea
}
fn default_sparsity() -> f64 {
    0.5
}
fn default_delta_t() -> usize {
    25
}
fn default_exploration() -> f64 {
    0.7
}
fn default_gamma() -> f64 {
    0.5
}
fn default_tau() -> f64 {
    0.9
}
fn default_prune() -> PruneCriterion {
    PruneCriterion::Salience
}
fn default_grow() -> GrowCriterion {
    GrowCriterion::HistGradRandom
}
fn default_batch() -> usize {
    32
}
fn default_eval_trajectories() -> usize {
    512
}
fn default_init_range() -> f64 {
    std::f64::consts::PI
}

impl TrainConfig {
    /// A config with every optional field at its default.
    pub fn new(task: TaskSpec, template: TemplateKind, n_blocks: usize, total_iterations: usize) -> Self {
        Self {
            task,
            template,
            n_blocks,
            mode: default_mode(),
            noise: default_noise(),
            optimizer: default_optimizer(),
            lr_start: default_lr_start(),
            lr_end: default_lr_end(),
            warmup_fraction: default_warmup(),
            total_iterations,
            method: default_method(),
            sparsity: default_sparsity(),
            delta_t: default_delta_t(),
            exploration_fraction: default_exploration(),
            gamma: default_gamma(),
            tau: default_tau(),
            prune: default_prune(),
            grow: default_grow(),
            batch_size: default_batch(),
            init_range: default_init_range(),
            eval_trajectories: default_eval_trajectories(),
            eval_every: 0,
            seed: 0,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Last iteration (exclusive) at which the topology may change.
    pub fn t_end(&self) -> usize {
        (self.exploration_fraction * self.total_iterations as f64).floor() as usize
    }

    pub fn warmup_iterations(&self) -> usize {
        (self.warmup_fraction * self.total_iterations as f64).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: String| Err(Error::Config(format!("{field}: {msg}")));
        if self.n_blocks == 0 {
            return bad("n_blocks", "must be at least 1".into());
        }
        if self.total_iterations == 0 {
            return bad("total_iterations", "must be at least 1".into());
        }
        if self.batch_size == 0 {
            return bad("batch_size", "must be at least 1".into());
        }
        if self.delta_t == 0 {
            return bad("delta_t", "must be at least 1".into());
        }
        if !(self.exploration_fraction > 0.0 && self.exploration_fraction <= 1.0) {
            return bad("exploration_fraction", format!("{} outside (0, 1]", self.exploration_fraction));
        }
        if self.method != Method::Dense && !(self.sparsity > 0.0 && self.sparsity < 1.0) {
            return bad("sparsity", format!("{} outside (0, 1)", self.sparsity));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return bad("gamma", format!("{} outside (0, 1]", self.gamma));
        }
        if !(0.0..1.0).contains(&self.tau) {
            return bad("tau", format!("{} outside [0, 1)", self.tau));
        }
        if !(0.0..1.0).contains(&self.warmup_fraction) {
            return bad("warmup_fraction", format!("{} outside [0, 1)", self.warmup_fraction));
        }
        for (field, v) in [("lr_start", self.lr_start), ("lr_end", self.lr_end), ("init_range", self.init_range)] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(field, format!("{v} must be finite and ≥ 0"));
            }
        }
        if let TaskSpec::Qml { n_per_class: 0, .. } = self.task {
            return bad("task.n_per_class", "must be at least 1".into());
        }
        Ok(())
    }

    /// The noise model the run trains under, if any.
    pub fn noise_model(&self, base: &Path) -> Result<Option<NoiseModel>> {
        match self.mode {
            NoiseMode::Noisefree => Ok(None),
            NoiseMode::Noisy => resolve_noise(&self.noise, base).map(Some),
        }
    }
}

/// A preset name, or otherwise a TOML path relative to `base`.
pub fn resolve_noise(name: &str, base: &Path) -> Result<NoiseModel> {
    match NoiseModel::preset(name) {
        Ok(m) => Ok(m),
        Err(_) => {
            let path = base.join(name);
            if path.exists() {
                NoiseModel::load(&path)
            } else {
                Err(Error::Config(format!("noise: {name:?} is neither a preset nor a file")))
            }
        }
    }
}

/// A task with its data loaded.
#[derive(Clone, Debug)]
pub enum Task {
    Vqe {
        hamiltonian: Hamiltonian,
    },
    Qml {
        train: Dataset,
        valid: Dataset,
        test: Option<Dataset>,
    },
}

impl Task {
    /// Loads the data `spec` refers to; relative paths resolve against `base`.
    pub fn load(spec: &TaskSpec, base: &Path, seed: u64) -> Result<Self> {
        let resolve = |p: &str| -> PathBuf { base.join(p) };
        match spec {
            TaskSpec::Vqe { hamiltonian } => {
                let hamiltonian = if hamiltonian == "h2" {
                    Hamiltonian::h2()
                } else {
                    Hamiltonian::load(&resolve(hamiltonian))?
                };
                Ok(Task::Vqe { hamiltonian })
            }
            TaskSpec::Qml {
                dataset,
                n_per_class,
                encoder,
                test_dataset,
            } => {
                let full = match dataset.strip_prefix("synth:") {
                    Some(kind) => {
                        let kind: SynthKind = kind.parse()?;
                        if *encoder != EncoderKind::Image16 {
                            return Err(Error::Config("task.encoder: synthetic datasets need image16".into()));
                        }
                        synth_dataset(kind, *n_per_class, seed)?
                    }
                    None => load_dataset(&resolve(dataset), *encoder)?,
                };
                let (train, valid) = full.split_train_valid(seed);
                let test = test_dataset
                    .as_deref()
                    .map(|p| load_dataset(&resolve(p), *encoder))
                    .transpose()?;
                Ok(Task::Qml { train, valid, test })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const VQE: &str = r#"
template = "rxyz"
n_blocks = 4
total_iterations = 100
seed = 3

[task]
kind = "vqe"
hamiltonian = "h2"
"#;

    #[test]
    fn defaults_and_round_trip() {
        let c = TrainConfig::from_toml(VQE).unwrap();
        assert_eq!(c.gamma, 0.5);
        assert_eq!(c.tau, 0.9);
        assert_eq!(c.exploration_fraction, 0.7);
        assert_eq!(c.t_end(), 70);
        assert_eq!(TrainConfig::from_toml(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn unknown_keys_are_named() {
        let err = TrainConfig::from_toml(&format!("bogus_key = 1\n{VQE}")).unwrap_err();
        assert!(err.to_string().contains("bogus_key"), "{err}");
        let err = TrainConfig::from_toml(&format!("{VQE}extra = 2\n")).unwrap_err();
        assert!(err.to_string().contains("extra"), "{err}");
    }

    #[test]
    fn field_level_validation() {
        let err = TrainConfig::from_toml(&VQE.replace("seed = 3", "exploration_fraction = 1.5")).unwrap_err();
        assert!(err.to_string().contains("exploration_fraction"), "{err}");
    }

    #[test]
    fn qml_task_loads_split() {
        let spec = TaskSpec::Qml {
            dataset: "synth:two_class_16".into(),
            n_per_class: 10,
            encoder: EncoderKind::Image16,
            test_dataset: None,
        };
        let Task::Qml { train, valid, test } = Task::load(&spec, Path::new("."), 1).unwrap() else {
            panic!("expected qml")
        };
        assert_eq!((train.len(), valid.len(), test.is_none()), (16, 4, true));
    }
}
