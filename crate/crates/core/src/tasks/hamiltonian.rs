use std::fmt;
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;

use crate::config::MAX_DIAG_QUBITS;
use crate::error::{Error, Result};
use crate::qstate::{Pauli, PauliString, C64};

/// Weighted sum of Pauli strings on a fixed number of qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian {
    n_qubits: usize,
    terms: Vec<(f64, PauliString)>,
}

impl Hamiltonian {
    pub fn new(terms: Vec<(f64, PauliString)>) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::Validation("Hamiltonian has no terms".into()));
        };
        let n_qubits = first.len();
        for (i, (c, p)) in terms.iter().enumerate() {
            if !c.is_finite() {
                return Err(Error::Validation(format!("term {i}: coefficient {c} is not finite")));
            }
            if p.len() != n_qubits {
                return Err(Error::Shape(format!(
                    "term {i}: Pauli string on {} qubits, expected {n_qubits}",
                    p.len()
                )));
            }
        }
        Ok(Self { n_qubits, terms })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn coefficients(&self) -> Vec<f64> {
        self.terms.iter().map(|(c, _)| *c).collect()
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        text.parse()
    }

    /// The H2 molecule in a minimal basis, reduced to two qubits.
    pub fn h2() -> Self {
        include_str!("../../data/h2.txt").parse().expect("shipped Hamiltonian parses")
    }

    /// Dense `2^n × 2^n` matrix.
    pub fn matrix(&self) -> Result<DMatrix<C64>> {
        if self.n_qubits > MAX_DIAG_QUBITS {
            return Err(Error::Capacity(format!(
                "dense matrix of a {}-qubit Hamiltonian exceeds the {MAX_DIAG_QUBITS}-qubit limit",
                self.n_qubits
            )));
        }
        let dim = 1usize << self.n_qubits;
        let mut m = DMatrix::<C64>::zeros(dim, dim);
        for (c, p) in &self.terms {
            for col in 0..dim {
                let mut row = col;
                let mut amp = C64::new(*c, 0.0);
                for (q, op) in p.iter_qubits() {
                    let bit = (col >> q) & 1;
                    match op {
                        Pauli::I => {}
                        Pauli::X => row ^= 1 << q,
                        Pauli::Y => {
                            row ^= 1 << q;
                            amp *= if bit == 0 { C64::i() } else { -C64::i() };
                        }
                        Pauli::Z => {
                            if bit == 1 {
                                amp = -amp;
                            }
                        }
                    }
                }
                m[(row, col)] += amp;
            }
        }
        Ok(m)
    }
}

impl FromStr for Hamiltonian {
    type Err = Error;

    /// One `coefficient pauli_string` term per line; `#` starts a comment.
    fn from_str(text: &str) -> Result<Self> {
        let mut terms = Vec::new();
        let mut n_qubits = None;
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |msg: String| Error::Parse { line: line_no, msg };
            let mut fields = line.split_whitespace();
            let (Some(c), Some(p), None) = (fields.next(), fields.next(), fields.next()) else {
                return Err(parse_err(format!("expected `coefficient pauli_string`, got {line:?}")));
            };
            let coef: f64 = c.parse().map_err(|_| parse_err(format!("bad coefficient {c:?}")))?;
            if !coef.is_finite() {
                return Err(parse_err(format!("coefficient {c} is not finite")));
            }
            let pauli: PauliString = p.parse().map_err(|e| parse_err(format!("{e}")))?;
            match n_qubits {
                None => n_qubits = Some(pauli.len()),
                Some(n) if n != pauli.len() => {
                    return Err(Error::Shape(format!(
                        "line {line_no}: Pauli string on {} qubits, expected {n}",
                        pauli.len()
                    )))
                }
                _ => {}
            }
            terms.push((coef, pauli));
        }
        Self::new(terms)
    }
}

impl fmt::Display for Hamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (c, p) in &self.terms {
            writeln!(f, "{c:?} {p}")?;
        }
        Ok(())
    }
}

/// Smallest eigenvalue of the dense Hamiltonian matrix.
pub fn exact_ground_energy(h: &Hamiltonian) -> Result<f64> {
    let m = h.matrix()?;
    let eig = m.symmetric_eigenvalues();
    Ok(eig.iter().copied().fold(f64::INFINITY, f64::min))
}
