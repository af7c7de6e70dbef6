use serde::{Deserialize, Serialize};

use super::{SparsityMask, UpdateEvent};

/// Which slots have ever been active, and every topology update so far.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExplorationLog {
    pub ever_active: Vec<bool>,
    pub events: Vec<UpdateEvent>,
}

impl ExplorationLog {
    pub fn new(mask: &SparsityMask) -> Self {
        Self {
            ever_active: mask.active().to_vec(),
            events: Vec::new(),
        }
    }

    pub fn ever_active_count(&self) -> usize {
        self.ever_active.iter().filter(|&&a| a).count()
    }

    pub(crate) fn mark_active(&mut self, slot: usize) {
        self.ever_active[slot] = true;
    }
}

/// `|ever active| / |active| − 1`; 0 when nothing is active.
pub fn implicit_capacity(log: &ExplorationLog, mask: &SparsityMask) -> f64 {
    let active = mask.active_count();
    if active == 0 {
        return 0.0;
    }
    log.ever_active_count() as f64 / active as f64 - 1.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_template, TemplateKind};
    use crate::sparse::init_mask;

    #[test]
    fn fresh_log_has_zero_capacity() {
        let c = build_template(TemplateKind::Rxyz, 4, 2).unwrap();
        let m = init_mask(&c, &[0.5], 1).unwrap();
        assert_eq!(implicit_capacity(&ExplorationLog::new(&m), &m), 0.0);
    }

    #[test]
    fn full_exploration_hits_upper_bound() {
        let c = build_template(TemplateKind::Rxyz, 4, 2).unwrap();
        for (s, expected) in [(0.5, 1.0), (0.8, 4.0)] {
            let m = init_mask(&c, &[s], 1).unwrap();
            let mut log = ExplorationLog::new(&m);
            log.ever_active.iter_mut().for_each(|a| *a = true);
            let i = implicit_capacity(&log, &m);
            let realized = m.realized_sparsity();
            assert!((i - (1.0 / (1.0 - realized) - 1.0)).abs() < 1e-12);
            if s == 0.5 {
                assert!((i - expected).abs() < 1e-12);
            }
        }
        // 0.8 on 12-slot blocks keeps round(2.4) = 2 each, realized 5/6.
        // A 10-slot mask at exactly 0.8 gives the textbook value.
        let mut log = ExplorationLog {
            ever_active: vec![true; 10],
            events: vec![],
        };
        let c = build_template(TemplateKind::Zzry, 5, 1).unwrap();
        let m = init_mask(&c, &[0.8], 3).unwrap();
        assert_eq!(m.active_count(), 2);
        assert!((implicit_capacity(&log, &m) - 4.0).abs() < 1e-12);
        log.ever_active[0] = false;
        assert!(implicit_capacity(&log, &m) < 4.0);
    }
}
