use serde::{Deserialize, Serialize};

use super::SparsityMask;
use crate::error::{Error, Result};
use crate::grad::GradientVector;

/// Exponential moving average of absolute gradients, kept for every slot
/// that has ever been active.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradAccumulator {
    m: Vec<f64>,
    tau: f64,
    seen: Vec<bool>,
}

impl GradAccumulator {
    pub fn new(n_slots: usize, tau: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&tau) {
            return Err(Error::Validation(format!("tau {tau} outside [0, 1)")));
        }
        Ok(Self {
            m: vec![0.0; n_slots],
            tau,
            seen: vec![false; n_slots],
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.m
    }

    pub fn value(&self, slot: usize) -> f64 {
        self.m[slot]
    }

    pub fn seen(&self, slot: usize) -> bool {
        self.seen[slot]
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `m ← τ·m + (1−τ)·|g|` on active slots; inactive slots are untouched.
    pub fn update(&mut self, grads: &GradientVector, mask: &SparsityMask) -> Result<()> {
        if grads.values.len() != self.m.len() || mask.len() != self.m.len() {
            return Err(Error::Shape(format!(
                "accumulator of {} slots given {} gradients and a {}-slot mask",
                self.m.len(),
                grads.values.len(),
                mask.len()
            )));
        }
        for (s, (m, g)) in self.m.iter_mut().zip(&grads.values).enumerate() {
            if mask.is_active(s) {
                *m = self.tau * *m + (1.0 - self.tau) * g.abs();
                self.seen[s] = true;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_template, TemplateKind};

    fn setup() -> (SparsityMask, GradAccumulator) {
        let c = build_template(TemplateKind::Rxyz, 2, 1).unwrap();
        let mut mask = SparsityMask::dense(&c);
        mask.set_active(1, false);
        (mask, GradAccumulator::new(c.n_params(), 0.9).unwrap())
    }

    #[test]
    fn single_step() {
        let (mask, mut acc) = setup();
        let mut g = GradientVector::zeros(6, true);
        g.values[0] = -1.0;
        acc.update(&g, &mask).unwrap();
        assert!((acc.value(0) - 0.1).abs() < 1e-15);
        assert!(acc.seen(0));
    }

    #[test]
    fn geometric_decay_and_inactive_untouched() {
        let (mask, mut acc) = setup();
        let mut g = GradientVector::zeros(6, false);
        g.values[0] = 1.0;
        g.values[1] = 5.0;
        acc.update(&g, &mask).unwrap();
        let zero = GradientVector::zeros(6, false);
        for _ in 0..7 {
            acc.update(&zero, &mask).unwrap();
        }
        assert!((acc.value(0) - 0.1 * 0.9f64.powi(7)).abs() < 1e-15);
        assert_eq!(acc.value(1), 0.0);
        assert!(!acc.seen(1));
    }

    #[test]
    fn tau_range() {
        assert!(GradAccumulator::new(3, 1.0).is_err());
        assert!(GradAccumulator::new(3, 0.0).is_ok());
    }
}
