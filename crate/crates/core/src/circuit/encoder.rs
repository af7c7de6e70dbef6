use std::f64::consts::PI;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Gate, GateKind};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EncoderKind {
    /// 4x4 image: RX, RY, RZ, RX layers of four gates; features in `[0, 1]`.
    Image16,
    /// Ten reduced audio features: RX, RY layers of four gates, then two RZ.
    Vowel10,
}

impl EncoderKind {
    pub fn n_features(self) -> usize {
        match self {
            EncoderKind::Image16 => 16,
            EncoderKind::Vowel10 => 10,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EncoderKind::Image16 => "image16",
            EncoderKind::Vowel10 => "vowel10",
        }
    }

    /// Rotation angle for a feature value. Image features map `v -> v·π`;
    /// standardized vowel features are clipped to `[-1, 1]` first.
    pub fn angle(self, v: f64) -> f64 {
        match self {
            EncoderKind::Image16 => v * PI,
            EncoderKind::Vowel10 => v.clamp(-1.0, 1.0) * PI,
        }
    }

    fn layers(self) -> &'static [(GateKind, usize)] {
        match self {
            EncoderKind::Image16 => &[
                (GateKind::Rx, 4),
                (GateKind::Ry, 4),
                (GateKind::Rz, 4),
                (GateKind::Rx, 4),
            ],
            EncoderKind::Vowel10 => &[(GateKind::Rx, 4), (GateKind::Ry, 4), (GateKind::Rz, 2)],
        }
    }
}

impl FromStr for EncoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "image16" => Ok(EncoderKind::Image16),
            "vowel10" => Ok(EncoderKind::Vowel10),
            other => Err(Error::Config(format!("unknown encoder {other:?}"))),
        }
    }
}

/// Encoder gates, one per feature, bound in reading order.
pub fn build_encoder(kind: EncoderKind, n_qubits: usize) -> Result<Vec<Gate>> {
    if n_qubits != 4 {
        return Err(Error::Config(format!(
            "{} encoder needs 4 qubits, got {n_qubits}",
            kind.name()
        )));
    }
    let mut gates = Vec::with_capacity(kind.n_features());
    for &(gk, width) in kind.layers() {
        for q in 0..width {
            let feature = gates.len();
            gates.push(Gate::encoder(gk, q, feature));
        }
    }
    Ok(gates)
}
