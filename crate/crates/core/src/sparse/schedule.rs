use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// When and how much the topology may change.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpdateSchedule {
    /// Iterations between topology updates.
    pub delta_t: usize,
    /// No updates at or after this iteration.
    pub t_end: usize,
    /// Initial changeable fraction.
    pub gamma: f64,
}

impl UpdateSchedule {
    pub fn new(delta_t: usize, t_end: usize, gamma: f64) -> Result<Self> {
        if delta_t == 0 {
            return Err(Error::Schedule("update interval must be positive".into()));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::Schedule(format!("gamma {gamma} outside (0, 1]")));
        }
        Ok(Self {
            delta_t,
            t_end,
            gamma,
        })
    }

    /// Whether iteration `t` performs a topology update.
    pub fn is_update(&self, t: usize) -> bool {
        t.is_multiple_of(self.delta_t) && t < self.t_end
    }

    /// Update iterations of a run whose iterations are numbered from 1.
    pub fn update_iterations(&self) -> Vec<usize> {
        (1..self.t_end).filter(|&t| self.is_update(t)).collect()
    }

    /// Growth exploration weight, decaying linearly from 1 at `t = 0` to 0 at
    /// `t_end`.
    pub fn kappa(&self, t: usize) -> f64 {
        if self.t_end == 0 {
            return 0.0;
        }
        (1.0 - t as f64 / self.t_end as f64).clamp(0.0, 1.0)
    }
}

/// Cosine-annealed changeable fraction `γ/2 · (1 + cos(tπ / T_end))`.
pub fn f_decay(t: usize, schedule: &UpdateSchedule) -> Result<f64> {
    if schedule.t_end == 0 || t > schedule.t_end {
        return Err(Error::Schedule(format!(
            "iteration {t} is past the exploration window ending at {}",
            schedule.t_end
        )));
    }
    let phase = t as f64 * PI / schedule.t_end as f64;
    Ok(schedule.gamma / 2.0 * (1.0 + phase.cos()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decay_endpoints() {
        let s = UpdateSchedule::new(10, 100, 0.5).unwrap();
        assert_eq!(f_decay(0, &s).unwrap(), 0.5);
        assert!(f_decay(100, &s).unwrap().abs() < 1e-12);
        assert!((f_decay(50, &s).unwrap() - 0.25).abs() < 1e-12);
        assert!(matches!(f_decay(101, &s), Err(Error::Schedule(_))));
    }

    #[test]
    fn decay_is_monotone() {
        let s = UpdateSchedule::new(1, 77, 0.8).unwrap();
        let v: Vec<f64> = (0..=77).map(|t| f_decay(t, &s).unwrap()).collect();
        assert!(v.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn update_iterations_are_multiples_below_end() {
        let s = UpdateSchedule::new(25, 175, 0.5).unwrap();
        assert_eq!(s.update_iterations(), vec![25, 50, 75, 100, 125, 150]);
        let s = UpdateSchedule::new(10, 100, 0.5).unwrap();
        assert_eq!(s.update_iterations().last(), Some(&90));
        let s = UpdateSchedule::new(50, 20, 0.5).unwrap();
        assert!(s.update_iterations().is_empty());
    }

    #[test]
    fn kappa_linear() {
        let s = UpdateSchedule::new(2, 40, 0.5).unwrap();
        assert_eq!(s.kappa(0), 1.0);
        assert_eq!(s.kappa(10), 0.75);
        assert_eq!(s.kappa(40), 0.0);
    }

    #[test]
    fn invalid() {
        assert!(UpdateSchedule::new(0, 10, 0.5).is_err());
        assert!(UpdateSchedule::new(1, 10, 0.0).is_err());
        assert!(UpdateSchedule::new(1, 10, 1.5).is_err());
    }
}
