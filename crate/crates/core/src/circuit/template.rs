use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{BlockTag, Circuit, Gate, GateKind, MeasurementSpec};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemplateKind {
    /// U3 layer + CU3 ring.
    U3cu3,
    /// ZZ ring + RY layer.
    Zzry,
    /// √H layer once, then RX, RY, RZ layers + CZ ring per block.
    Rxyz,
    /// ZX ring + XX ring.
    Zxxx,
    /// RZ, X, RZ, SX, RZ layers + CNOT ring.
    IbmqBasis,
}

impl TemplateKind {
    pub const ALL: [TemplateKind; 5] = [
        TemplateKind::U3cu3,
        TemplateKind::Zzry,
        TemplateKind::Rxyz,
        TemplateKind::Zxxx,
        TemplateKind::IbmqBasis,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TemplateKind::U3cu3 => "u3cu3",
            TemplateKind::Zzry => "zzry",
            TemplateKind::Rxyz => "rxyz",
            TemplateKind::Zxxx => "zxxx",
            TemplateKind::IbmqBasis => "ibmq_basis",
        }
    }

    /// Layers of one block, in order.
    fn block_layers(self) -> &'static [Layer] {
        use GateKind::*;
        use Layer::{Ring, Single};
        match self {
            TemplateKind::U3cu3 => &[Single(U3), Ring(Cu3)],
            TemplateKind::Zzry => &[Ring(Zz), Single(Ry)],
            TemplateKind::Rxyz => &[Single(Rx), Single(Ry), Single(Rz), Ring(Cz)],
            TemplateKind::Zxxx => &[Ring(Zx), Ring(Xx)],
            TemplateKind::IbmqBasis => &[
                Single(Rz),
                Single(X),
                Single(Rz),
                Single(Sx),
                Single(Rz),
                Ring(Cnot),
            ],
        }
    }
}

impl fmt::Display for TemplateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TemplateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TemplateKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown circuit template {s:?}")))
    }
}

#[derive(Clone, Copy)]
enum Layer {
    Single(GateKind),
    Ring(GateKind),
}

/// Ring connections `(0,1), (1,2), ..., (n-1,0)`. On two qubits the ring
/// degenerates to the single pair `(0,1)`.
pub fn ring_pairs(n_qubits: usize) -> Vec<(usize, usize)> {
    match n_qubits {
        0 | 1 => Vec::new(),
        2 => vec![(0, 1)],
        n => (0..n).map(|q| (q, (q + 1) % n)).collect(),
    }
}

/// Builds one of the five block templates with a per-qubit Z readout and
/// a zero parameter table.
pub fn build_template(kind: TemplateKind, n_qubits: usize, n_blocks: usize) -> Result<Circuit> {
    if n_qubits < 2 {
        return Err(Error::Config(format!("templates need >= 2 qubits, got {n_qubits}")));
    }
    if n_blocks == 0 {
        return Err(Error::Config("templates need at least one block".into()));
    }
    let mut gates = Vec::new();
    let mut next_slot = 0;
    let mut slots_for = |k: GateKind| {
        let s: Vec<usize> = (next_slot..next_slot + k.n_params()).collect();
        next_slot += k.n_params();
        s
    };
    if kind == TemplateKind::Rxyz {
        for q in 0..n_qubits {
            gates.push(Gate::trainable(GateKind::SqrtH, vec![q], vec![], BlockTag::Prefix));
        }
    }
    let ring = ring_pairs(n_qubits);
    for b in 0..n_blocks {
        for layer in kind.block_layers() {
            match *layer {
                Layer::Single(k) => {
                    for q in 0..n_qubits {
                        gates.push(Gate::trainable(k, vec![q], slots_for(k), BlockTag::Block(b)));
                    }
                }
                Layer::Ring(k) => {
                    for &(a, c) in &ring {
                        gates.push(Gate::trainable(k, vec![a, c], slots_for(k), BlockTag::Block(b)));
                    }
                }
            }
        }
    }
    Ok(Circuit::new(n_qubits, n_blocks, gates, MeasurementSpec::per_qubit_z())?.with_template_kind(kind))
}
