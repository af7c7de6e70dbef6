use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A tensor product of single-qubit Paulis.
///
/// Textual form lists qubit 0 as the rightmost character.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    /// Indexed by qubit.
    ops: Vec<Pauli>,
}

impl PauliString {
    pub fn from_ops(ops: Vec<Pauli>) -> Self {
        Self { ops }
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        self.ops[qubit]
    }

    pub fn is_identity(&self) -> bool {
        self.ops.iter().all(|p| *p == Pauli::I)
    }

    pub fn iter_qubits(&self) -> impl Iterator<Item = (usize, Pauli)> + '_ {
        self.ops.iter().copied().enumerate()
    }

    /// Bitmask of the qubits carrying a non-identity Pauli.
    pub fn support_mask(&self) -> usize {
        self.iter_qubits()
            .filter(|(_, p)| *p != Pauli::I)
            .fold(0, |m, (q, _)| m | 1 << q)
    }

    /// `(flip mask, phase mask, number of Y)` describing
    /// `P|k> = i^nY (-1)^{|k & phase|} |k ^ flip>`.
    pub(crate) fn masks(&self) -> (usize, usize, usize) {
        let mut flip = 0;
        let mut phase = 0;
        let mut n_y = 0;
        for (q, p) in self.iter_qubits() {
            match p {
                Pauli::I => {}
                Pauli::X => flip |= 1 << q,
                Pauli::Z => phase |= 1 << q,
                Pauli::Y => {
                    flip |= 1 << q;
                    phase |= 1 << q;
                    n_y += 1;
                }
            }
        }
        (flip, phase, n_y)
    }

    /// The measurement basis of this string: identity positions measured in Z.
    pub(crate) fn basis_key(&self) -> Vec<Pauli> {
        self.ops
            .iter()
            .map(|p| if *p == Pauli::I { Pauli::Z } else { *p })
            .collect()
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut ops = Vec::with_capacity(s.len());
        for (col, ch) in s.chars().rev().enumerate() {
            let p = match ch {
                'I' => Pauli::I,
                'X' => Pauli::X,
                'Y' => Pauli::Y,
                'Z' => Pauli::Z,
                other => {
                    return Err(Error::Parse {
                        line: 0,
                        msg: format!("invalid Pauli character {other:?} in {s:?} (qubit {col})"),
                    })
                }
            };
            ops.push(p);
        }
        if ops.is_empty() {
            return Err(Error::Parse {
                line: 0,
                msg: "empty Pauli string".into(),
            });
        }
        Ok(Self { ops })
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.ops.iter().rev() {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}
