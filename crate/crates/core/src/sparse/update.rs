use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{f_decay, implicit_capacity, ExplorationLog, GradAccumulator, SparsityMask, UpdateSchedule};
use crate::error::{Error, Result};
use crate::grad::GradientVector;
use crate::rng::{stream, stream_rng};

/// Score used to pick active slots for removal (lowest first).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PruneCriterion {
    /// `|θ|`
    Weight,
    /// `|∇θ L|`
    Gradient,
    /// `|θ · ∇θ L|`
    Salience,
    /// Historical gradient accumulator `M`.
    HistGradient,
    Random,
}

/// Score used to pick inactive slots for activation (highest first).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowCriterion {
    /// `κ·r + (1−κ)·M̂`
    HistGradRandom,
    /// `M̂`
    HistGrad,
    /// `κ·r + (1−κ)·ĝ` using the latest gradient instead of the accumulator.
    GradRandom,
    Random,
}

macro_rules! named_enum {
    ($ty:ty { $($variant:ident => $name:literal),* $(,)? }) => {
        impl $ty {
            pub fn name(self) -> &'static str {
                match self { $(Self::$variant => $name),* }
            }
        }
        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.name())
            }
        }
        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($name => Ok(Self::$variant),)*
                    other => Err(Error::Config(format!(
                        concat!("unknown ", stringify!($ty), " {:?}"), other
                    ))),
                }
            }
        }
    };
}

named_enum!(PruneCriterion {
    Weight => "weight",
    Gradient => "gradient",
    Salience => "salience",
    HistGradient => "hist_gradient",
    Random => "random",
});

named_enum!(GrowCriterion {
    HistGradRandom => "hist_grad_random",
    HistGrad => "hist_grad",
    GradRandom => "grad_random",
    Random => "random",
});

/// One topology update.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpdateEvent {
    pub iteration: usize,
    pub pruned: Vec<usize>,
    pub grown: Vec<usize>,
    /// Slots exchanged in each block.
    pub rho: Vec<usize>,
    pub kappa: f64,
    /// Implicit capacity after the update.
    pub capacity: f64,
    /// Blocks whose budget was clamped to the available slots.
    pub clamped: Vec<usize>,
}

/// Min-max normalisation over `values`; all-equal input maps to 0.5.
fn min_max(values: &[f64]) -> Vec<f64> {
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi.partial_cmp(&lo) != Some(Ordering::Greater) {
        return vec![0.5; values.len()];
    }
    values.iter().map(|v| (v - lo) / (hi - lo)).collect()
}

/// Slots sorted by ascending score, ties by ascending slot id.
fn ascending(scored: &mut [(f64, usize)]) {
    scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
}

/// Slots sorted by descending score, ties by ascending slot id.
fn descending(scored: &mut [(f64, usize)]) {
    scored.sort_by(|a, b| match b.0.total_cmp(&a.0) {
        Ordering::Equal => a.1.cmp(&b.1),
        o => o,
    });
}

/// Prunes the lowest-scoring active slots and grows the same number of
/// inactive slots in every block, using a budget of
/// `round(f_decay(t) · (1 − s_b) · N_b)` per block.
///
/// Grown slots restart at angle 0, and so do pruned ones since inactive slots
/// are pinned to 0. Random draws come from a stream keyed by `(seed, t)`.
#[allow(clippy::too_many_arguments)]
pub fn prune_grow_update(
    mask: &mut SparsityMask,
    params: &mut [f64],
    grads: &GradientVector,
    acc: &GradAccumulator,
    t: usize,
    schedule: &UpdateSchedule,
    prune: PruneCriterion,
    grow: GrowCriterion,
    seed: u64,
    log: &mut ExplorationLog,
) -> Result<UpdateEvent> {
    if !schedule.is_update(t) {
        return Err(Error::Schedule(format!(
            "iteration {t} is not an update step (interval {}, window end {})",
            schedule.delta_t, schedule.t_end
        )));
    }
    let n = mask.len();
    if params.len() != n || grads.values.len() != n || acc.values().len() != n || log.ever_active.len() != n {
        return Err(Error::Shape("mask, params, gradients, accumulator and log must align".into()));
    }
    let fraction = f_decay(t, schedule)?;
    let kappa = match grow {
        GrowCriterion::HistGrad => 0.0,
        GrowCriterion::Random => 1.0,
        _ => schedule.kappa(t),
    };
    let mut rng = stream_rng(seed, stream::TOPOLOGY, t as u64);
    let mut event = UpdateEvent {
        iteration: t,
        pruned: Vec::new(),
        grown: Vec::new(),
        rho: Vec::with_capacity(mask.n_blocks()),
        kappa,
        capacity: 0.0,
        clamped: Vec::new(),
    };

    for b in 0..mask.n_blocks() {
        let slots: Vec<usize> = mask.block_slots(b).collect();
        let (active, inactive): (Vec<usize>, Vec<usize>) = slots.iter().partition(|&&s| mask.is_active(s));
        let budget = (fraction * (1.0 - mask.target_sparsity(b)) * mask.block_size(b) as f64).round() as usize;
        let rho = budget.min(active.len()).min(inactive.len());
        if rho < budget {
            event.clamped.push(b);
        }
        event.rho.push(rho);
        if rho == 0 {
            continue;
        }

        let mut prune_scores: Vec<(f64, usize)> = active
            .iter()
            .map(|&s| {
                let score = match prune {
                    PruneCriterion::Weight => params[s].abs(),
                    PruneCriterion::Gradient => grads.values[s].abs(),
                    PruneCriterion::Salience => (params[s] * grads.values[s]).abs(),
                    PruneCriterion::HistGradient => acc.value(s),
                    PruneCriterion::Random => rng.random::<f64>(),
                };
                (score, s)
            })
            .collect();
        ascending(&mut prune_scores);

        let signal: Vec<f64> = match grow {
            GrowCriterion::GradRandom => inactive.iter().map(|&s| grads.values[s].abs()).collect(),
            _ => inactive.iter().map(|&s| acc.value(s).abs()).collect(),
        };
        let normalized = min_max(&signal);
        let mut grow_scores: Vec<(f64, usize)> = inactive
            .iter()
            .zip(normalized)
            .map(|(&s, m)| {
                let score = if kappa > 0.0 {
                    let r: f64 = rng.random();
                    kappa * r + (1.0 - kappa) * m
                } else {
                    m
                };
                (score, s)
            })
            .collect();
        descending(&mut grow_scores);

        for &(_, s) in &prune_scores[..rho] {
            mask.set_active(s, false);
            params[s] = 0.0;
            event.pruned.push(s);
        }
        for &(_, s) in &grow_scores[..rho] {
            mask.set_active(s, true);
            params[s] = 0.0;
            log.mark_active(s);
            event.grown.push(s);
        }
    }
    event.capacity = implicit_capacity(log, mask);
    log.events.push(event.clone());
    Ok(event)
}
