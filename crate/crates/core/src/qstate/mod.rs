//! Dense statevector simulation.
//!
//! Basis index `k` encodes qubit `q` in bit `q` of `k`, so qubit 0 is the least
//! significant bit. A ket written `|10>` lists qubit 1 first and has index 2.

mod gates;
mod pauli;

pub use gates::GateMatrix;
pub use pauli::{Pauli, PauliString};

use num_complex::Complex64;

use crate::config::{MAX_QUBITS, TOLERANCES};
use crate::error::{Error, Result};

pub type C64 = Complex64;

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<C64>,
}

impl StateVector {
    /// `|0...0>` on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::Capacity(format!(
                "{n_qubits} qubits requested, engine supports 1..={MAX_QUBITS}"
            )));
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = C64::new(1.0, 0.0);
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    /// Builds a state from raw amplitudes, normalizing them.
    pub fn from_amplitudes(amplitudes: Vec<C64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Shape(format!(
                "amplitude count {len} is not a power of two >= 2"
            )));
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(Error::Capacity(format!("{n_qubits} qubits exceeds {MAX_QUBITS}")));
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::Validation("state has zero or non-finite norm".into()));
        }
        let amplitudes = amplitudes.into_iter().map(|a| a / norm).collect();
        Ok(Self {
            n_qubits,
            amplitudes,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Applies `gate` to `wires`, validating the wire list and, in debug
    /// builds, the unitarity of the matrix.
    pub fn apply_gate(&mut self, gate: &GateMatrix, wires: &[usize]) -> Result<()> {
        self.check_wires(wires)?;
        if gate.dim() != 1 << wires.len() {
            return Err(Error::Wire(format!(
                "gate of dimension {} cannot act on {} wires",
                gate.dim(),
                wires.len()
            )));
        }
        if cfg!(debug_assertions) && !gate.is_unitary(TOLERANCES.unitarity) {
            return Err(Error::Validation("gate matrix is not unitary".into()));
        }
        match wires {
            [w] => self.apply_1q(gate, *w),
            [a, b] => self.apply_2q(gate, *a, *b),
            _ => unreachable!("dimension check admits only 1 or 2 wires"),
        }
        Ok(())
    }

    fn check_wires(&self, wires: &[usize]) -> Result<()> {
        if wires.is_empty() || wires.len() > 2 {
            return Err(Error::Wire(format!("{} wires given, expected 1 or 2", wires.len())));
        }
        for (i, &w) in wires.iter().enumerate() {
            if w >= self.n_qubits {
                return Err(Error::Wire(format!(
                    "wire {w} out of range for {} qubits",
                    self.n_qubits
                )));
            }
            if wires[..i].contains(&w) {
                return Err(Error::Wire(format!("duplicate wire {w}")));
            }
        }
        Ok(())
    }

    /// Unchecked single-qubit kernel.
    pub(crate) fn apply_1q(&mut self, gate: &GateMatrix, wire: usize) {
        let m = gate.entries();
        let (m00, m01, m10, m11) = (m[0], m[1], m[4], m[5]);
        let bit = 1usize << wire;
        let amps = &mut self.amplitudes;
        for base in 0..amps.len() {
            if base & bit != 0 {
                continue;
            }
            let i1 = base | bit;
            let a0 = amps[base];
            let a1 = amps[i1];
            amps[base] = m00 * a0 + m01 * a1;
            amps[i1] = m10 * a0 + m11 * a1;
        }
    }

    /// Unchecked two-qubit kernel. `first` is the high bit of the local
    /// 4x4 index, `second` the low bit.
    pub(crate) fn apply_2q(&mut self, gate: &GateMatrix, first: usize, second: usize) {
        let m = gate.entries();
        let hi = 1usize << first;
        let lo = 1usize << second;
        let amps = &mut self.amplitudes;
        for base in 0..amps.len() {
            if base & (hi | lo) != 0 {
                continue;
            }
            let idx = [base, base | lo, base | hi, base | hi | lo];
            let a = [amps[idx[0]], amps[idx[1]], amps[idx[2]], amps[idx[3]]];
            for (r, &target) in idx.iter().enumerate() {
                let row = &m[4 * r..4 * r + 4];
                amps[target] = row[0] * a[0] + row[1] * a[1] + row[2] * a[2] + row[3] * a[3];
            }
        }
    }

    /// Applies a single-qubit Pauli without building a matrix.
    pub(crate) fn apply_pauli(&mut self, pauli: Pauli, wire: usize) {
        let bit = 1usize << wire;
        let i = C64::new(0.0, 1.0);
        match pauli {
            Pauli::I => {}
            Pauli::X => {
                for base in 0..self.amplitudes.len() {
                    if base & bit == 0 {
                        self.amplitudes.swap(base, base | bit);
                    }
                }
            }
            Pauli::Y => {
                for base in 0..self.amplitudes.len() {
                    if base & bit == 0 {
                        let a0 = self.amplitudes[base];
                        let a1 = self.amplitudes[base | bit];
                        self.amplitudes[base] = -i * a1;
                        self.amplitudes[base | bit] = i * a0;
                    }
                }
            }
            Pauli::Z => {
                for (k, a) in self.amplitudes.iter_mut().enumerate() {
                    if k & bit != 0 {
                        *a = -*a;
                    }
                }
            }
        }
    }

    /// `<psi|P|psi>` including its (numerically tiny) imaginary part.
    pub fn expectation_complex(&self, pauli: &PauliString) -> Result<C64> {
        if pauli.len() != self.n_qubits {
            return Err(Error::Shape(format!(
                "Pauli string of length {} on {} qubits",
                pauli.len(),
                self.n_qubits
            )));
        }
        let (flip, phase_mask, n_y) = pauli.masks();
        let global = match n_y % 4 {
            0 => C64::new(1.0, 0.0),
            1 => C64::new(0.0, 1.0),
            2 => C64::new(-1.0, 0.0),
            _ => C64::new(0.0, -1.0),
        };
        let mut acc = C64::new(0.0, 0.0);
        for (k, &a) in self.amplitudes.iter().enumerate() {
            // P|k> = global * (-1)^{popcount(k & phase_mask)} |k ^ flip>
            let term = self.amplitudes[k ^ flip].conj() * a;
            if (k & phase_mask).count_ones() % 2 == 1 {
                acc -= term;
            } else {
                acc += term;
            }
        }
        Ok(global * acc)
    }

    /// Real expectation of a Pauli string, clamped to `[-1, 1]`.
    pub fn expectation(&self, pauli: &PauliString) -> Result<f64> {
        let value = self.expectation_complex(pauli)?;
        debug_assert!(value.im.abs() < 1e-8, "non-Hermitian expectation {value}");
        Ok(value.re.clamp(-1.0, 1.0))
    }

    /// Parses `pauli` and returns its expectation.
    pub fn expectation_pauli_string(&self, pauli: &str) -> Result<f64> {
        self.expectation(&pauli.parse()?)
    }

    /// `<Z_q>` for every qubit, read from the amplitudes.
    pub fn z_expectations(&self) -> Vec<f64> {
        z_expectations_from_probs(&self.probabilities(), self.n_qubits)
    }

    /// Probability of every basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Rotates every non-identity position of `pauli` into the Z basis so that
    /// its expectation becomes a parity over computational-basis outcomes.
    pub(crate) fn rotate_to_z_basis(&mut self, pauli: &PauliString) {
        for (q, p) in pauli.iter_qubits() {
            match p {
                Pauli::X => self.apply_1q(&GateMatrix::h(), q),
                Pauli::Y => {
                    self.apply_1q(&GateMatrix::sdg(), q);
                    self.apply_1q(&GateMatrix::h(), q);
                }
                Pauli::I | Pauli::Z => {}
            }
        }
    }
}

/// `<Z_q>` for each qubit from a basis-state distribution.
pub fn z_expectations_from_probs(probs: &[f64], n_qubits: usize) -> Vec<f64> {
    let mut out = vec![0.0; n_qubits];
    for (k, &p) in probs.iter().enumerate() {
        for (q, o) in out.iter_mut().enumerate() {
            if k >> q & 1 == 0 {
                *o += p;
            } else {
                *o -= p;
            }
        }
    }
    out
}

/// Expectation of the parity over the qubits in `support` given a
/// computational-basis distribution.
pub fn parity_expectation(probs: &[f64], support: usize) -> f64 {
    probs
        .iter()
        .enumerate()
        .map(|(k, &p)| if (k & support).count_ones().is_multiple_of(2) { p } else { -p })
        .sum()
}

/// Convenience wrapper matching `init_zero_state`.
pub fn init_zero_state(n_qubits: usize) -> Result<StateVector> {
    StateVector::zero(n_qubits)
}

/// Probability of each basis state.
pub fn basis_probabilities(state: &StateVector) -> Vec<f64> {
    state.probabilities()
}
