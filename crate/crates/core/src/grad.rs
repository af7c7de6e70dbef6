//! Parameter-shift gradients and a central-difference oracle.

use std::f64::consts::{FRAC_PI_2, SQRT_2};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{forward, Circuit, ShiftRule};
use crate::error::{Error, Result};
use crate::noise::{NoiseModel, NoisyEvaluator};
use crate::sparse::SparsityMask;
use crate::tasks::LossSpec;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientVector {
    /// Aligned with the parameter table.
    pub values: Vec<f64>,
    /// Set when inactive slots are guaranteed to hold exactly 0.
    pub active_only: bool,
}

impl GradientVector {
    pub fn zeros(n: usize, active_only: bool) -> Self {
        Self {
            values: vec![0.0; n],
            active_only,
        }
    }

    pub fn max_abs_diff(&self, other: &GradientVector) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Four-term coefficients for generators with spectrum `{-1/2, 0, 1/2}`.
const C_PLUS: f64 = (SQRT_2 + 1.0) / (4.0 * SQRT_2);
const C_MINUS: f64 = (SQRT_2 - 1.0) / (4.0 * SQRT_2);

enum Backend<'a> {
    Clean,
    Noisy(NoisyEvaluator<'a>),
}

struct Evaluation<'a> {
    circuit: &'a Circuit,
    encoder_angles: Vec<f64>,
    presence: Vec<bool>,
    backend: Backend<'a>,
}

impl<'a> Evaluation<'a> {
    fn new(circuit: &'a Circuit, input: &[f64], mask: &SparsityMask, model: Option<&'a NoiseModel>, seed: u64) -> Self {
        let backend = match model {
            Some(m) if !m.is_trivial(circuit.n_qubits()) => Backend::Noisy(NoisyEvaluator::new(circuit, mask, m, seed)),
            _ => Backend::Clean,
        };
        Self {
            circuit,
            encoder_angles: circuit.encoder_angles(input),
            presence: circuit.presence(mask),
            backend,
        }
    }

    fn outputs(&self, angles: &[f64]) -> Vec<f64> {
        match &self.backend {
            Backend::Clean => self.circuit.evaluate(&self.encoder_angles, angles, &self.presence),
            Backend::Noisy(n) => n.evaluate(&self.encoder_angles, angles),
        }
    }

    fn shifted(&self, angles: &[f64], slot: usize, delta: f64) -> Vec<f64> {
        let mut a = angles.to_vec();
        a[slot] += delta;
        self.outputs(&a)
    }

    /// `d outputs / d angle[slot]`.
    fn output_derivative(&self, angles: &[f64], slot: usize) -> Vec<f64> {
        let kind = self.circuit.trainable_gates()[self.circuit.slot_gate(slot)].kind;
        let plus = self.shifted(angles, slot, FRAC_PI_2);
        let minus = self.shifted(angles, slot, -FRAC_PI_2);
        match kind.shift_rule() {
            ShiftRule::TwoTerm => plus.iter().zip(&minus).map(|(p, m)| 0.5 * (p - m)).collect(),
            ShiftRule::FourTerm => {
                let plus3 = self.shifted(angles, slot, 3.0 * FRAC_PI_2);
                let minus3 = self.shifted(angles, slot, -3.0 * FRAC_PI_2);
                (0..plus.len())
                    .map(|k| C_PLUS * (plus[k] - minus[k]) - C_MINUS * (plus3[k] - minus3[k]))
                    .collect()
            }
        }
    }
}

/// Loss, outputs and parameter-shift gradient for one example.
pub(crate) struct ExampleGrad {
    pub loss: f64,
    pub outputs: Vec<f64>,
    pub grad: GradientVector,
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn example_grad(
    circuit: &Circuit,
    input: &[f64],
    params: &[f64],
    mask: &SparsityMask,
    loss: &LossSpec,
    model: Option<&NoiseModel>,
    seed: u64,
) -> Result<ExampleGrad> {
    circuit.check_lengths(input, params, mask)?;
    let eval = Evaluation::new(circuit, input, mask, model, seed);
    let angles = circuit.effective_angles(params, mask);
    let outputs = eval.outputs(&angles);
    let (value, dl_dc) = loss.value_and_grad(&outputs)?;
    let active: Vec<usize> = (0..params.len()).filter(|&s| mask.is_active(s)).collect();
    let partials: Vec<f64> = active
        .par_iter()
        .map(|&s| {
            eval.output_derivative(&angles, s)
                .iter()
                .zip(&dl_dc)
                .map(|(d, g)| d * g)
                .sum()
        })
        .collect();
    let mut grad = GradientVector::zeros(params.len(), true);
    for (s, g) in active.into_iter().zip(partials) {
        grad.values[s] = g;
    }
    Ok(ExampleGrad {
        loss: value,
        outputs,
        grad,
    })
}

/// Gradient of `loss` by the parameter-shift rule. Inactive slots get 0.
/// Under a noise model every shifted evaluation reuses the trajectories drawn
/// from the model's seed.
pub fn param_shift_grad(
    circuit: &Circuit,
    input: &[f64],
    params: &[f64],
    mask: &SparsityMask,
    loss: &LossSpec,
    model: Option<&NoiseModel>,
) -> Result<GradientVector> {
    let seed = model.map_or(0, |m| m.seed);
    Ok(example_grad(circuit, input, params, mask, loss, model, seed)?.grad)
}

/// Central differences of the noiseless loss on every active slot.
pub fn finite_diff_grad(
    circuit: &Circuit,
    input: &[f64],
    params: &[f64],
    mask: &SparsityMask,
    loss: &LossSpec,
    eps: f64,
) -> Result<GradientVector> {
    if !(1e-8..=1e-2).contains(&eps) {
        return Err(Error::Validation(format!("finite-difference step {eps} outside [1e-8, 1e-2]")));
    }
    let eval = |p: &[f64]| -> Result<f64> { Ok(loss.value_and_grad(&forward(circuit, input, p, mask)?)?.0) };
    let mut grad = GradientVector::zeros(params.len(), true);
    let mut p = params.to_vec();
    for s in (0..params.len()).filter(|&s| mask.is_active(s)) {
        p[s] = params[s] + eps;
        let up = eval(&p)?;
        p[s] = params[s] - eps;
        let down = eval(&p)?;
        p[s] = params[s];
        grad.values[s] = (up - down) / (2.0 * eps);
    }
    Ok(grad)
}

/// Mean loss and mean gradient over a mini-batch.
#[derive(Clone, Debug)]
pub struct BatchGrad {
    pub loss: f64,
    pub grad: GradientVector,
    /// Measurement outputs of each example at the unshifted parameters.
    pub outputs: Vec<Vec<f64>>,
}

pub fn loss_and_grad_batch(
    circuit: &Circuit,
    batch: &[(&[f64], LossSpec)],
    params: &[f64],
    mask: &SparsityMask,
    model: Option<&NoiseModel>,
    seed: u64,
) -> Result<BatchGrad> {
    if batch.is_empty() {
        return Err(Error::Validation("empty mini-batch".into()));
    }
    let per_example: Vec<ExampleGrad> = batch
        .par_iter()
        .map(|(input, loss)| example_grad(circuit, input, params, mask, loss, model, seed))
        .collect::<Result<_>>()?;
    let n = per_example.len() as f64;
    let mut grad = GradientVector::zeros(params.len(), true);
    let mut loss = 0.0;
    let mut outputs = Vec::with_capacity(per_example.len());
    for ex in per_example {
        loss += ex.loss;
        for (g, v) in grad.values.iter_mut().zip(&ex.grad.values) {
            *g += v;
        }
        outputs.push(ex.outputs);
    }
    grad.values.iter_mut().for_each(|g| *g /= n);
    Ok(BatchGrad {
        loss: loss / n,
        grad,
        outputs,
    })
}
