use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::sparse::SparsityMask;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OptimizerKind {
    /// Plain gradient descent with a cosine-annealed learning rate.
    SgdCosine,
    /// Adam with decoupled weight decay, linear warmup then cosine decay.
    AdamWarmup,
}

/// Learning-rate schedule over iterations `1..=total`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LrSchedule {
    pub kind: OptimizerKind,
    pub lr_start: f64,
    pub lr_end: f64,
    pub total: usize,
    /// Warmup length in iterations (Adam only).
    pub warmup: usize,
}

impl LrSchedule {
    fn cosine(&self, progress: f64) -> f64 {
        self.lr_end + 0.5 * (self.lr_start - self.lr_end) * (1.0 + (PI * progress.clamp(0.0, 1.0)).cos())
    }

    pub fn lr(&self, t: usize) -> f64 {
        match self.kind {
            OptimizerKind::SgdCosine => {
                let span = self.total.saturating_sub(1).max(1) as f64;
                self.cosine((t.saturating_sub(1)) as f64 / span)
            }
            OptimizerKind::AdamWarmup => {
                if t <= self.warmup {
                    self.lr_start * t as f64 / self.warmup as f64
                } else {
                    let span = self.total.saturating_sub(self.warmup).max(1) as f64;
                    self.cosine((t - self.warmup) as f64 / span)
                }
            }
        }
    }
}

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;
pub const WEIGHT_DECAY: f64 = 1e-4;

/// Masked parameter updates; inactive slots never move.
#[derive(Clone, Debug)]
pub struct Optimizer {
    kind: OptimizerKind,
    m: Vec<f64>,
    v: Vec<f64>,
    steps: Vec<u32>,
}

impl Optimizer {
    pub fn new(kind: OptimizerKind, n: usize) -> Self {
        Self {
            kind,
            m: vec![0.0; n],
            v: vec![0.0; n],
            steps: vec![0; n],
        }
    }

    pub fn step(&mut self, params: &mut [f64], grads: &[f64], mask: &SparsityMask, lr: f64) {
        for s in (0..params.len()).filter(|&s| mask.is_active(s)) {
            let g = grads[s];
            match self.kind {
                OptimizerKind::SgdCosine => params[s] -= lr * g,
                OptimizerKind::AdamWarmup => {
                    self.steps[s] += 1;
                    let k = self.steps[s] as i32;
                    self.m[s] = BETA1 * self.m[s] + (1.0 - BETA1) * g;
                    self.v[s] = BETA2 * self.v[s] + (1.0 - BETA2) * g * g;
                    let m_hat = self.m[s] / (1.0 - BETA1.powi(k));
                    let v_hat = self.v[s] / (1.0 - BETA2.powi(k));
                    params[s] -= lr * (m_hat / (v_hat.sqrt() + ADAM_EPS) + WEIGHT_DECAY * params[s]);
                }
            }
        }
    }

    /// Forgets the moment estimates of slots whose topology changed.
    pub fn reset(&mut self, slots: impl IntoIterator<Item = usize>) {
        for s in slots {
            self.m[s] = 0.0;
            self.v[s] = 0.0;
            self.steps[s] = 0;
        }
    }
}
