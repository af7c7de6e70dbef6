//! Stochastic Pauli error insertion after gates, per-qubit readout confusion,
//! and averaging over sampled error trajectories.
//!
//! Each trajectory is a pure-state simulation of the circuit with Pauli
//! errors drawn independently after every present gate. The insertions of
//! trajectory `k` depend only on `(seed, k)`.

use std::collections::BTreeMap;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, GateKind, MeasurementMode};
use crate::config::TOLERANCES;
use crate::error::{Error, Result};
use crate::qstate::{parity_expectation, z_expectations_from_probs, Pauli, PauliString, StateVector};
use crate::rng::{derive_seed, stream, stream_rng};
use crate::sparse::SparsityMask;

/// Probabilities of an X, Y or Z error; the remainder is no error.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct PauliProbs {
    pub px: f64,
    pub py: f64,
    pub pz: f64,
}

impl From<[f64; 3]> for PauliProbs {
    fn from([px, py, pz]: [f64; 3]) -> Self {
        Self { px, py, pz }
    }
}

impl From<PauliProbs> for [f64; 3] {
    fn from(p: PauliProbs) -> Self {
        [p.px, p.py, p.pz]
    }
}

impl PauliProbs {
    pub fn uniform(p: f64) -> Self {
        Self { px: p, py: p, pz: p }
    }

    pub fn total(&self) -> f64 {
        self.px + self.py + self.pz
    }

    fn validate(&self, what: &str) -> Result<()> {
        let ok = [self.px, self.py, self.pz].iter().all(|p| (0.0..=1.0).contains(p)) && self.total() <= 1.0 + 1e-12;
        if ok {
            Ok(())
        } else {
            Err(Error::Validation(format!("{what}: Pauli probabilities {self:?} are not a sub-distribution")))
        }
    }

    fn sample(&self, u: f64) -> Pauli {
        if u < self.px {
            Pauli::X
        } else if u < self.px + self.py {
            Pauli::Y
        } else if u < self.total() {
            Pauli::Z
        } else {
            Pauli::I
        }
    }
}

/// Row-stochastic confusion matrix: `m[true][observed]`.
pub type Confusion = [[f64; 2]; 2];

const IDEAL_READOUT: Confusion = [[1.0, 0.0], [0.0, 1.0]];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    /// Errors after single-qubit gates, by kind.
    #[serde(default)]
    pub p1: BTreeMap<String, PauliProbs>,
    /// Errors after two-qubit gates, drawn independently on each wire.
    #[serde(default)]
    pub p2: BTreeMap<String, PauliProbs>,
    /// Confusion for qubits without a per-qubit entry.
    #[serde(default)]
    pub readout_default: Option<Confusion>,
    /// Per-qubit confusion, indexed by qubit.
    #[serde(default)]
    pub readout: Vec<Confusion>,
    pub n_trajectories: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::noiseless()
    }
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self {
            p1: BTreeMap::new(),
            p2: BTreeMap::new(),
            readout_default: None,
            readout: Vec::new(),
            n_trajectories: 1,
            seed: 0,
        }
    }

    /// The same Pauli probabilities on every gate kind.
    pub fn uniform(p1: PauliProbs, p2: PauliProbs, n_trajectories: usize, seed: u64) -> Self {
        let mut m = Self::noiseless();
        for k in GateKind::ALL {
            let map = if k.n_wires() == 1 { &mut m.p1 } else { &mut m.p2 };
            map.insert(k.name().to_string(), if k.n_wires() == 1 { p1 } else { p2 });
        }
        m.n_trajectories = n_trajectories;
        m.seed = seed;
        m
    }

    /// Symmetric readout flip probability `e` on every qubit.
    pub fn with_symmetric_readout(mut self, e: f64) -> Self {
        self.readout_default = Some([[1.0 - e, e], [e, 1.0 - e]]);
        self
    }

    pub fn santiago_like() -> Self {
        Self::from_toml(include_str!("../data/santiago_like.toml")).expect("shipped preset parses")
    }

    /// Looks up a shipped preset by name.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "santiago_like" | "santiago-like" => Ok(Self::santiago_like()),
            "noiseless" | "none" => Self::from_toml(include_str!("../data/noiseless.toml")),
            other => Err(Error::Config(format!(
                "unknown noise preset {other:?} (known: santiago_like, noiseless)"
            ))),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let model: Self = toml::from_str(text).map_err(|e| Error::Config(format!("noise model: {e}")))?;
        model.validate()?;
        Ok(model)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("noise model serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_trajectories == 0 {
            return Err(Error::Validation("n_trajectories must be positive".into()));
        }
        for (table, wires) in [(&self.p1, 1), (&self.p2, 2)] {
            for (name, probs) in table {
                let kind: GateKind = name.parse()?;
                if kind.n_wires() != wires {
                    return Err(Error::Validation(format!(
                        "{name} acts on {} wires but is listed under p{wires}",
                        kind.n_wires()
                    )));
                }
                probs.validate(name)?;
            }
        }
        for (i, m) in self.readout_default.iter().chain(&self.readout).enumerate() {
            for row in m {
                if row.iter().any(|p| !(0.0..=1.0).contains(p))
                    || (row[0] + row[1] - 1.0).abs() > TOLERANCES.stochastic_row
                {
                    return Err(Error::Validation(format!("readout matrix {i} is not row-stochastic: {m:?}")));
                }
            }
        }
        Ok(())
    }

    fn gate_probs(&self, kind: GateKind) -> Option<PauliProbs> {
        let table = if kind.n_wires() == 1 { &self.p1 } else { &self.p2 };
        table.get(kind.name()).copied().filter(|p| p.total() > 0.0)
    }

    pub fn has_gate_noise(&self) -> bool {
        self.p1.values().chain(self.p2.values()).any(|p| p.total() > 0.0)
    }

    pub fn confusion(&self, qubit: usize) -> Confusion {
        self.readout
            .get(qubit)
            .copied()
            .or(self.readout_default)
            .unwrap_or(IDEAL_READOUT)
    }

    pub fn has_readout_noise(&self, n_qubits: usize) -> bool {
        (0..n_qubits).any(|q| self.confusion(q) != IDEAL_READOUT)
    }

    pub fn is_trivial(&self, n_qubits: usize) -> bool {
        !self.has_gate_noise() && !self.has_readout_noise(n_qubits)
    }
}

/// Pauli errors inserted after each gate of [`Circuit::all_gates`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decoration {
    pub after: Vec<Vec<(usize, Pauli)>>,
}

/// One element of a decorated gate sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DecoratedOp {
    /// Gate `index` of [`Circuit::all_gates`].
    Gate(usize),
    Error { wire: usize, pauli: Pauli },
}

impl Decoration {
    pub fn n_errors(&self) -> usize {
        self.after.iter().map(Vec::len).sum()
    }

    /// Present gates interleaved with their inserted errors.
    pub fn sequence(&self, circuit: &Circuit, mask: &SparsityMask) -> Vec<DecoratedOp> {
        let presence = full_presence(circuit, mask);
        let mut ops = Vec::new();
        for (i, after) in self.after.iter().enumerate() {
            if !presence[i] {
                continue;
            }
            ops.push(DecoratedOp::Gate(i));
            ops.extend(after.iter().map(|&(wire, pauli)| DecoratedOp::Error { wire, pauli }));
        }
        ops
    }
}

/// Presence over encoder and trainable gates together.
fn full_presence(circuit: &Circuit, mask: &SparsityMask) -> Vec<bool> {
    let mut p = vec![true; circuit.encoder_gates().len()];
    p.extend(circuit.presence(mask));
    p
}

fn sample_with_seed(circuit: &Circuit, presence: &[bool], model: &NoiseModel, seed: u64, trajectory: u64) -> Decoration {
    let mut rng = stream_rng(seed, stream::NOISE, trajectory);
    let after = circuit
        .all_gates()
        .zip(presence)
        .map(|(g, &present)| {
            let mut errs = Vec::new();
            if let (true, Some(p)) = (present, model.gate_probs(g.kind)) {
                for &w in &g.wires {
                    let e = p.sample(rng.random());
                    if e != Pauli::I {
                        errs.push((w, e));
                    }
                }
            }
            errs
        })
        .collect();
    Decoration { after }
}

/// Samples the error insertions of one trajectory using the model's seed.
pub fn sample_error_insertions(circuit: &Circuit, mask: &SparsityMask, model: &NoiseModel, trajectory: u64) -> Decoration {
    sample_with_seed(circuit, &full_presence(circuit, mask), model, model.seed, trajectory)
}

/// Pushes a basis-state distribution through the per-qubit confusion
/// matrices.
pub fn apply_readout_error(probs: &[f64], model: &NoiseModel) -> Result<Vec<f64>> {
    let len = probs.len();
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::Validation(format!("{len} probabilities is not a power of two >= 2")));
    }
    let total: f64 = probs.iter().sum();
    if probs.iter().any(|p| !p.is_finite() || *p < -TOLERANCES.distribution)
        || (total - 1.0).abs() > TOLERANCES.distribution
    {
        return Err(Error::Validation(format!("input is not a distribution (sum {total})")));
    }
    let mut out = probs.to_vec();
    confuse_in_place(&mut out, model);
    Ok(out)
}

fn confuse_in_place(probs: &mut [f64], model: &NoiseModel) {
    let n_qubits = probs.len().trailing_zeros() as usize;
    for q in 0..n_qubits {
        let m = model.confusion(q);
        if m == IDEAL_READOUT {
            continue;
        }
        let bit = 1 << q;
        for base in 0..probs.len() {
            if base & bit != 0 {
                continue;
            }
            let (p0, p1) = (probs[base], probs[base | bit]);
            probs[base] = p0 * m[0][0] + p1 * m[1][0];
            probs[base | bit] = p0 * m[0][1] + p1 * m[1][1];
        }
    }
}

/// Precomputed trajectories for repeated evaluation of one topology, e.g.
/// the shifted evaluations of a gradient.
pub(crate) struct NoisyEvaluator<'a> {
    circuit: &'a Circuit,
    model: &'a NoiseModel,
    presence: Vec<bool>,
    decorations: Vec<Decoration>,
    /// Distinct measurement bases of the Hamiltonian terms.
    bases: Vec<PauliString>,
    /// For each term: index into `bases`, or `None` for the identity.
    term_basis: Vec<Option<usize>>,
}

impl<'a> NoisyEvaluator<'a> {
    pub(crate) fn new(circuit: &'a Circuit, mask: &SparsityMask, model: &'a NoiseModel, seed: u64) -> Self {
        let presence = circuit.presence(mask);
        let full = full_presence(circuit, mask);
        let n_traj = if model.has_gate_noise() { model.n_trajectories } else { 1 };
        let decorations = (0..n_traj as u64)
            .map(|k| sample_with_seed(circuit, &full, model, seed, k))
            .collect();
        let mut bases: Vec<PauliString> = Vec::new();
        let mut term_basis = Vec::new();
        if let Some(h) = &circuit.measurement().hamiltonian {
            for (_, p) in h.terms() {
                if p.is_identity() {
                    term_basis.push(None);
                    continue;
                }
                let key = PauliString::from_ops(p.basis_key());
                let idx = bases.iter().position(|b| *b == key).unwrap_or_else(|| {
                    bases.push(key);
                    bases.len() - 1
                });
                term_basis.push(Some(idx));
            }
        }
        Self {
            circuit,
            model,
            presence,
            decorations,
            bases,
            term_basis,
        }
    }

    pub(crate) fn evaluate(&self, encoder_angles: &[f64], angles: &[f64]) -> Vec<f64> {
        let mut acc = vec![0.0; self.circuit.n_outputs()];
        for dec in &self.decorations {
            let state = self
                .circuit
                .prepare_state(encoder_angles, angles, &self.presence, Some(&dec.after));
            for (a, v) in acc.iter_mut().zip(self.readout(&state)) {
                *a += v;
            }
        }
        let n = self.decorations.len() as f64;
        acc.iter_mut().for_each(|a| *a /= n);
        acc
    }

    fn readout(&self, state: &StateVector) -> Vec<f64> {
        let c = self.circuit;
        match c.measurement().mode {
            MeasurementMode::Hamiltonian => {
                let h = c.measurement().hamiltonian.as_ref().expect("validated");
                let basis_probs: Vec<Vec<f64>> = self
                    .bases
                    .iter()
                    .map(|b| {
                        let mut s = state.clone();
                        s.rotate_to_z_basis(b);
                        let mut p = s.probabilities();
                        confuse_in_place(&mut p, self.model);
                        p
                    })
                    .collect();
                h.terms()
                    .iter()
                    .zip(&self.term_basis)
                    .map(|((_, p), b)| match b {
                        None => 1.0,
                        Some(i) => parity_expectation(&basis_probs[*i], p.support_mask()),
                    })
                    .collect()
            }
            _ => {
                let mut p = state.probabilities();
                confuse_in_place(&mut p, self.model);
                c.measurement().outputs_from_z(&z_expectations_from_probs(&p, c.n_qubits()))
            }
        }
    }
}

/// Noise-averaged forward pass using the model's own seed.
pub fn noisy_forward(
    circuit: &Circuit,
    input: &[f64],
    params: &[f64],
    mask: &SparsityMask,
    model: &NoiseModel,
) -> Result<Vec<f64>> {
    noisy_forward_seeded(circuit, input, params, mask, model, model.seed)
}

/// As [`noisy_forward`] with an explicit trajectory seed.
pub fn noisy_forward_seeded(
    circuit: &Circuit,
    input: &[f64],
    params: &[f64],
    mask: &SparsityMask,
    model: &NoiseModel,
    seed: u64,
) -> Result<Vec<f64>> {
    circuit.check_lengths(input, params, mask)?;
    model.validate()?;
    let eval = NoisyEvaluator::new(circuit, mask, model, seed);
    Ok(eval.evaluate(&circuit.encoder_angles(input), &circuit.effective_angles(params, mask)))
}

/// Seed for the trajectories of iteration `t` of the run seeded `run_seed`.
pub fn iteration_seed(model: &NoiseModel, run_seed: u64, t: u64) -> u64 {
    derive_seed(derive_seed(model.seed, run_seed), t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{build_template, forward, EncoderKind, MeasurementSpec, TemplateKind};
    use crate::tasks::Hamiltonian;

    fn qml_circuit() -> Circuit {
        build_template(TemplateKind::Rxyz, 4, 2)
            .unwrap()
            .with_encoder(EncoderKind::Image16)
            .unwrap()
    }

    #[test]
    fn zero_probabilities_leave_sequence_unchanged() {
        let c = qml_circuit();
        let mask = SparsityMask::dense(&c);
        let model = NoiseModel::uniform(PauliProbs::uniform(0.0), PauliProbs::uniform(0.0), 4, 1);
        let dec = sample_error_insertions(&c, &mask, &model, 0);
        assert_eq!(dec.n_errors(), 0);
        let seq = dec.sequence(&c, &mask);
        assert_eq!(seq, (0..c.all_gates().count()).map(DecoratedOp::Gate).collect::<Vec<_>>());
    }

    #[test]
    fn certain_x_after_every_present_rx() {
        let c = qml_circuit();
        let mut mask = SparsityMask::dense(&c);
        mask.set_active(0, false); // first RX of block 0 vanishes
        let mut model = NoiseModel::noiseless();
        model.p1.insert("RX".into(), PauliProbs { px: 1.0, py: 0.0, pz: 0.0 });
        let dec = sample_error_insertions(&c, &mask, &model, 3);
        let presence = full_presence(&c, &mask);
        for ((g, errs), present) in c.all_gates().zip(&dec.after).zip(presence) {
            if g.kind == GateKind::Rx && present {
                assert_eq!(errs, &vec![(g.wires[0], Pauli::X)]);
            } else {
                assert!(errs.is_empty());
            }
        }
        let n_rx_present = c.all_gates().filter(|g| g.kind == GateKind::Rx).count() - 1;
        assert_eq!(dec.n_errors(), n_rx_present);
    }

    #[test]
    fn insertion_is_deterministic() {
        let c = qml_circuit();
        let mask = SparsityMask::dense(&c);
        let model = NoiseModel::uniform(PauliProbs::uniform(0.1), PauliProbs::uniform(0.2), 4, 11);
        assert_eq!(sample_error_insertions(&c, &mask, &model, 2), sample_error_insertions(&c, &mask, &model, 2));
        assert_ne!(sample_error_insertions(&c, &mask, &model, 2), sample_error_insertions(&c, &mask, &model, 3));
    }

    #[test]
    fn readout_examples() {
        let ideal = NoiseModel::noiseless();
        assert_eq!(apply_readout_error(&[0.25, 0.5, 0.25, 0.0], &ideal).unwrap(), vec![0.25, 0.5, 0.25, 0.0]);
        let mut m = NoiseModel::noiseless();
        m.readout = vec![[[0.9, 0.1], [0.2, 0.8]]];
        let out = apply_readout_error(&[1.0, 0.0], &m).unwrap();
        assert!((out[0] - 0.9).abs() < 1e-15 && (out[1] - 0.1).abs() < 1e-15);
        let out = apply_readout_error(&[0.5, 0.5], &m).unwrap();
        assert!((out.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(matches!(apply_readout_error(&[0.7, 0.7], &m), Err(Error::Validation(_))));
    }

    #[test]
    fn trivial_model_reduces_to_forward() {
        let c = qml_circuit();
        let mask = SparsityMask::dense(&c);
        let params: Vec<f64> = (0..c.n_params()).map(|i| (i as f64 * 0.37).sin()).collect();
        let input: Vec<f64> = (0..16).map(|i| i as f64 / 15.0).collect();
        let clean = forward(&c, &input, &params, &mask).unwrap();
        let mut model = NoiseModel::noiseless();
        for n in [1, 2] {
            model.n_trajectories = n;
            let noisy = noisy_forward(&c, &input, &params, &mask, &model).unwrap();
            for (a, b) in clean.iter().zip(&noisy) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn readout_shrinks_z_expectation() {
        // Single qubit, no gates: <Z> = 1 - 2e.
        let c = Circuit::new(1, 0, vec![], MeasurementSpec::per_qubit_z()).unwrap();
        let mask = SparsityMask::dense(&c);
        let model = NoiseModel::noiseless().with_symmetric_readout(0.1);
        let out = noisy_forward(&c, &[], &[], &mask, &model).unwrap();
        assert!((out[0] - 0.8).abs() < 1e-12);
    }

    #[test]
    fn hamiltonian_readout_through_rotated_bases() {
        let h: Hamiltonian = "0.5 II\n1.0 XX\n-0.3 ZI\n0.2 YZ".parse().unwrap();
        let c = build_template(TemplateKind::Rxyz, 2, 1)
            .unwrap()
            .with_measurement(MeasurementSpec::hamiltonian(h))
            .unwrap();
        let mask = SparsityMask::dense(&c);
        let params = [0.3, -0.4, 1.1, 0.7, 0.2, -0.9];
        let clean = forward(&c, &[], &params, &mask).unwrap();
        let noisy = noisy_forward(&c, &[], &params, &mask, &NoiseModel::noiseless()).unwrap();
        for (a, b) in clean.iter().zip(&noisy) {
            assert!((a - b).abs() < 1e-12);
        }
        // Symmetric readout damps a weight-w term by (1-2e)^w.
        let e = 0.05;
        let damped = noisy_forward(&c, &[], &params, &mask, &NoiseModel::noiseless().with_symmetric_readout(e)).unwrap();
        let f = 1.0 - 2.0 * e;
        let expected = [clean[0], clean[1] * f * f, clean[2] * f, clean[3] * f * f];
        for (a, b) in damped.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn preset_and_file_schema() {
        let m = NoiseModel::santiago_like();
        assert_eq!(m.n_trajectories, 32);
        assert_eq!(m.p1["RX"], PauliProbs::uniform(0.001));
        assert_eq!(m.p2["CZ"], PauliProbs::uniform(0.01));
        assert_eq!(m.confusion(3), [[0.98, 0.02], [0.02, 0.98]]);
        let back = NoiseModel::from_toml(&m.to_toml()).unwrap();
        assert_eq!(back, m);
        assert!(NoiseModel::from_toml("n_trajectories = 1\n[p1]\nCZ = [0.1, 0.0, 0.0]").is_err());
        assert!(NoiseModel::from_toml("n_trajectories = 1\n[p1]\nRX = [0.5, 0.5, 0.5]").is_err());
        assert!(NoiseModel::from_toml("n_trajectories = 1\nbogus = 3").is_err());
        assert!(NoiseModel::preset("nope").is_err());
    }
}
