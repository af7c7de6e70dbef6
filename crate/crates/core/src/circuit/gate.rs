use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::qstate::GateMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum GateKind {
    Rx,
    Ry,
    Rz,
    U3,
    Cu3,
    Cz,
    Cnot,
    X,
    Sx,
    H,
    SqrtH,
    Zz,
    Zx,
    Xx,
}

/// How the derivative with respect to one angle of a gate is obtained from
/// shifted evaluations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftRule {
    /// Generator eigenvalues `±1/2`: `(f(θ+π/2) - f(θ-π/2)) / 2`.
    TwoTerm,
    /// Generator eigenvalues `{-1/2, 0, 1/2}` (controlled rotations).
    FourTerm,
}

impl GateKind {
    pub const ALL: [GateKind; 14] = [
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::U3,
        GateKind::Cu3,
        GateKind::Cz,
        GateKind::Cnot,
        GateKind::X,
        GateKind::Sx,
        GateKind::H,
        GateKind::SqrtH,
        GateKind::Zz,
        GateKind::Zx,
        GateKind::Xx,
    ];

    pub fn n_params(self) -> usize {
        match self {
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::Zz | GateKind::Zx | GateKind::Xx => 1,
            GateKind::U3 | GateKind::Cu3 => 3,
            _ => 0,
        }
    }

    pub fn n_wires(self) -> usize {
        match self {
            GateKind::Cu3 | GateKind::Cz | GateKind::Cnot | GateKind::Zz | GateKind::Zx | GateKind::Xx => 2,
            _ => 1,
        }
    }

    pub fn is_parameterized(self) -> bool {
        self.n_params() > 0
    }

    /// RX, RY and RZ: the "X/Y/Z gates" of circuit statistics.
    pub fn is_axis_rotation(self) -> bool {
        matches!(self, GateKind::Rx | GateKind::Ry | GateKind::Rz)
    }

    pub fn shift_rule(self) -> ShiftRule {
        match self {
            GateKind::Cu3 => ShiftRule::FourTerm,
            _ => ShiftRule::TwoTerm,
        }
    }

    /// Matrix for the given angles; `angles.len()` must equal `n_params()`.
    pub fn matrix(self, angles: &[f64]) -> GateMatrix {
        debug_assert_eq!(angles.len(), self.n_params());
        match self {
            GateKind::Rx => GateMatrix::rx(angles[0]),
            GateKind::Ry => GateMatrix::ry(angles[0]),
            GateKind::Rz => GateMatrix::rz(angles[0]),
            GateKind::U3 => GateMatrix::u3(angles[0], angles[1], angles[2]),
            GateKind::Cu3 => GateMatrix::cu3(angles[0], angles[1], angles[2]),
            GateKind::Cz => GateMatrix::cz(),
            GateKind::Cnot => GateMatrix::cnot(),
            GateKind::X => GateMatrix::x(),
            GateKind::Sx => GateMatrix::sx(),
            GateKind::H => GateMatrix::h(),
            GateKind::SqrtH => GateMatrix::sqrt_h(),
            GateKind::Zz => GateMatrix::zz(angles[0]),
            GateKind::Zx => GateMatrix::zx(angles[0]),
            GateKind::Xx => GateMatrix::xx(angles[0]),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::Rx => "RX",
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
            GateKind::U3 => "U3",
            GateKind::Cu3 => "CU3",
            GateKind::Cz => "CZ",
            GateKind::Cnot => "CNOT",
            GateKind::X => "X",
            GateKind::Sx => "SX",
            GateKind::H => "H",
            GateKind::SqrtH => "SQRT_H",
            GateKind::Zz => "ZZ",
            GateKind::Zx => "ZX",
            GateKind::Xx => "XX",
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        GateKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown gate kind {s:?}")))
    }
}

/// Where a gate sits in the circuit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlockTag {
    /// Input encoder; angles come from features.
    Encoder,
    /// Fixed layer ahead of the blocks (the √H layer of RXYZ).
    Prefix,
    Block(usize),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub wires: Vec<usize>,
    /// Indices into the trainable parameter table (trainable gates only).
    pub slots: Vec<usize>,
    /// Input feature bound to this gate's angle (encoder gates only).
    pub feature: Option<usize>,
    pub block: BlockTag,
}

impl Gate {
    pub fn trainable(kind: GateKind, wires: Vec<usize>, slots: Vec<usize>, block: BlockTag) -> Self {
        Self {
            kind,
            wires,
            slots,
            feature: None,
            block,
        }
    }

    pub fn encoder(kind: GateKind, wire: usize, feature: usize) -> Self {
        Self {
            kind,
            wires: vec![wire],
            slots: Vec::new(),
            feature: Some(feature),
            block: BlockTag::Encoder,
        }
    }
}
