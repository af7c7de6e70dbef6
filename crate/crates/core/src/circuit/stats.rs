use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::Circuit;
use crate::sparse::SparsityMask;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitStats {
    /// Number of layers in the as-soon-as-possible schedule of present gates.
    pub depth: usize,
    pub gate_counts: BTreeMap<String, usize>,
    /// RX + RY + RZ gates.
    pub rotation_gates: usize,
    pub two_qubit_gates: usize,
    pub total_gates: usize,
    pub active_params: usize,
    pub n_params: usize,
}

/// Statistics of the trainable part of `circuit` (prefix layer and blocks)
/// under `mask`. Parameterized gates with no active slot are absent.
pub fn circuit_stats(circuit: &Circuit, mask: &SparsityMask) -> CircuitStats {
    let presence = circuit.presence(mask);
    let mut level = vec![0usize; circuit.n_qubits()];
    let mut gate_counts = BTreeMap::new();
    let mut rotation_gates = 0;
    let mut two_qubit_gates = 0;
    let mut total_gates = 0;
    for (g, _) in circuit.trainable_gates().iter().zip(&presence).filter(|(_, &p)| p) {
        let l = g.wires.iter().map(|&w| level[w]).max().unwrap_or(0) + 1;
        for &w in &g.wires {
            level[w] = l;
        }
        *gate_counts.entry(g.kind.name().to_string()).or_insert(0) += 1;
        total_gates += 1;
        if g.kind.is_axis_rotation() {
            rotation_gates += 1;
        }
        if g.wires.len() == 2 {
            two_qubit_gates += 1;
        }
    }
    CircuitStats {
        depth: level.into_iter().max().unwrap_or(0),
        gate_counts,
        rotation_gates,
        two_qubit_gates,
        total_gates,
        active_params: mask.active_count(),
        n_params: circuit.n_params(),
    }
}
