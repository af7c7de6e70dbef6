use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, GateKind};
use crate::error::{Error, Result};
use crate::rng::{stream, stream_rng};

/// Active/inactive bit per parameter slot, partitioned by block.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparsityMask {
    active: Vec<bool>,
    block_of: Vec<usize>,
    /// Requested sparsity per block; 0 for dense masks.
    target_sparsity: Vec<f64>,
    block_sizes: Vec<usize>,
}

/// `round((1 - s) * n)`, half away from zero.
pub(crate) fn active_target(sparsity: f64, n: usize) -> usize {
    ((1.0 - sparsity) * n as f64).round() as usize
}

impl SparsityMask {
    fn with_all(circuit: &Circuit, value: bool, sparsity: f64) -> Self {
        let n_blocks = circuit.n_blocks();
        let block_of: Vec<usize> = (0..circuit.n_params()).map(|s| circuit.slot_block(s)).collect();
        let mut block_sizes = vec![0; n_blocks];
        for &b in &block_of {
            block_sizes[b] += 1;
        }
        Self {
            active: vec![value; circuit.n_params()],
            block_of,
            target_sparsity: vec![sparsity; n_blocks],
            block_sizes,
        }
    }

    /// Every slot active (the dense baseline).
    pub fn dense(circuit: &Circuit) -> Self {
        Self::with_all(circuit, true, 0.0)
    }

    /// Every slot inactive.
    pub fn empty(circuit: &Circuit) -> Self {
        Self::with_all(circuit, false, 1.0)
    }

    /// Rebuilds a mask from stored active bits.
    pub fn from_active(circuit: &Circuit, active: Vec<bool>, sparsity: &[f64]) -> Result<Self> {
        if active.len() != circuit.n_params() {
            return Err(Error::Shape(format!(
                "mask has {} slots, circuit has {}",
                active.len(),
                circuit.n_params()
            )));
        }
        let mut m = Self::with_all(circuit, false, 0.0);
        m.target_sparsity = broadcast(sparsity, circuit.n_blocks())?;
        m.active = active;
        Ok(m)
    }

    pub fn len(&self) -> usize {
        self.active.len()
    }

    pub fn is_empty(&self) -> bool {
        self.active.is_empty()
    }

    pub fn is_active(&self, slot: usize) -> bool {
        self.active[slot]
    }

    pub fn set_active(&mut self, slot: usize, value: bool) {
        self.active[slot] = value;
    }

    pub fn active(&self) -> &[bool] {
        &self.active
    }

    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|&&a| a).count()
    }

    pub fn n_blocks(&self) -> usize {
        self.block_sizes.len()
    }

    pub fn block_of(&self, slot: usize) -> usize {
        self.block_of[slot]
    }

    pub fn block_size(&self, block: usize) -> usize {
        self.block_sizes[block]
    }

    pub fn target_sparsity(&self, block: usize) -> f64 {
        self.target_sparsity[block]
    }

    pub fn block_slots(&self, block: usize) -> impl Iterator<Item = usize> + '_ {
        self.block_of
            .iter()
            .enumerate()
            .filter(move |(_, &b)| b == block)
            .map(|(s, _)| s)
    }

    pub fn block_active_count(&self, block: usize) -> usize {
        self.block_slots(block).filter(|&s| self.active[s]).count()
    }

    pub fn block_active_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_blocks()];
        for (s, &a) in self.active.iter().enumerate() {
            if a {
                counts[self.block_of[s]] += 1;
            }
        }
        counts
    }

    /// Fraction of inactive slots over the whole circuit.
    pub fn realized_sparsity(&self) -> f64 {
        if self.active.is_empty() {
            return 0.0;
        }
        1.0 - self.active_count() as f64 / self.active.len() as f64
    }
}

fn broadcast(sparsity: &[f64], n_blocks: usize) -> Result<Vec<f64>> {
    match sparsity.len() {
        1 => Ok(vec![sparsity[0]; n_blocks]),
        n if n == n_blocks => Ok(sparsity.to_vec()),
        n => Err(Error::Shape(format!(
            "{n} sparsity values for {n_blocks} blocks (give 1 or one per block)"
        ))),
    }
}

/// Random initial topology: one slot of every multi-slot controlled gate is
/// kept, then the rest of each block's budget is drawn uniformly without
/// replacement. `sparsity` holds one value per block, or a single value for
/// all blocks.
pub fn init_mask(circuit: &Circuit, sparsity: &[f64], seed: u64) -> Result<SparsityMask> {
    let targets = broadcast(sparsity, circuit.n_blocks())?;
    if let Some(s) = targets.iter().find(|s| !(**s > 0.0 && **s < 1.0)) {
        return Err(Error::Validation(format!(
            "sparsity {s} outside the open interval (0, 1); use a dense mask for 0"
        )));
    }
    let mut mask = SparsityMask::with_all(circuit, false, 0.0);
    mask.target_sparsity = targets;
    let mut rng = stream_rng(seed, stream::MASK_INIT, 0);
    for b in 0..circuit.n_blocks() {
        let want = active_target(mask.target_sparsity[b], mask.block_sizes[b]);
        let controlled: Vec<&[usize]> = circuit
            .trainable_gates()
            .iter()
            .filter(|g| g.kind == GateKind::Cu3 && g.slots.first().is_some_and(|&s| circuit.slot_block(s) == b))
            .map(|g| g.slots.as_slice())
            .collect();
        if want == 0 || want < controlled.len() {
            return Err(Error::Infeasible {
                block: b,
                msg: format!(
                    "sparsity {} leaves {want} of {} slots active, need at least {}",
                    mask.target_sparsity[b],
                    mask.block_sizes[b],
                    controlled.len().max(1)
                ),
            });
        }
        for slots in &controlled {
            let pick = slots[rng.random_range(0..slots.len())];
            mask.active[pick] = true;
        }
        let mut rest: Vec<usize> = mask.block_slots(b).filter(|&s| !mask.active[s]).collect();
        let remaining = want - controlled.len();
        let (chosen, _) = rest.partial_shuffle(&mut rng, remaining);
        for &s in chosen.iter() {
            mask.active[s] = true;
        }
    }
    Ok(mask)
}
