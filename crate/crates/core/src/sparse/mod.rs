//! In-time sparse topology exploration: masks, the update schedule, pruning
//! and growth, the historical gradient accumulator and implicit capacity.

mod accumulator;
mod capacity;
mod mask;
mod schedule;
mod update;

pub use accumulator::GradAccumulator;
pub use capacity::{implicit_capacity, ExplorationLog};
pub use mask::{init_mask, SparsityMask};
pub use schedule::{f_decay, UpdateSchedule};
pub use update::{prune_grow_update, GrowCriterion, PruneCriterion, UpdateEvent};
