//! Gate-level circuit IR, templates, encoders and the measurement head.

mod encoder;
mod export;
mod gate;
mod stats;
mod template;

pub use encoder::{build_encoder, EncoderKind};
pub use export::{describe, parse_description};
pub use gate::{BlockTag, Gate, GateKind, ShiftRule};
pub use stats::{circuit_stats, CircuitStats};
pub use template::{build_template, ring_pairs, TemplateKind};

use crate::error::{Error, Result};
use crate::qstate::{Pauli, StateVector};
use crate::sparse::SparsityMask;
use crate::tasks::Hamiltonian;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeasurementMode {
    /// One score per qubit: `<Z_q>`.
    PerQubitZ,
    /// One score per qubit group: the sum of `<Z_q>` over the group.
    PairedSum,
    /// One output per Hamiltonian term: `<P_i>`.
    Hamiltonian,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementSpec {
    pub mode: MeasurementMode,
    pub class_groups: Vec<Vec<usize>>,
    pub hamiltonian: Option<Hamiltonian>,
}

impl MeasurementSpec {
    pub fn per_qubit_z() -> Self {
        Self {
            mode: MeasurementMode::PerQubitZ,
            class_groups: Vec::new(),
            hamiltonian: None,
        }
    }

    pub fn paired_sum(groups: Vec<Vec<usize>>) -> Self {
        Self {
            mode: MeasurementMode::PairedSum,
            class_groups: groups,
            hamiltonian: None,
        }
    }

    /// `{0,1}`, `{2,3}`, ... pairing for 2-class readout.
    pub fn two_class_pairs(n_qubits: usize) -> Self {
        let half = n_qubits / 2;
        Self::paired_sum(vec![(0..half).collect(), (half..n_qubits).collect()])
    }

    pub fn hamiltonian(h: Hamiltonian) -> Self {
        Self {
            mode: MeasurementMode::Hamiltonian,
            class_groups: Vec::new(),
            hamiltonian: Some(h),
        }
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        match self.mode {
            MeasurementMode::PerQubitZ => Ok(()),
            MeasurementMode::PairedSum => {
                let mut seen = vec![false; n_qubits];
                if self.class_groups.is_empty() {
                    return Err(Error::Config("paired-sum readout needs class groups".into()));
                }
                for q in self.class_groups.iter().flatten() {
                    if *q >= n_qubits || std::mem::replace(&mut seen[*q], true) {
                        return Err(Error::Config(format!(
                            "class groups must be disjoint qubits below {n_qubits}, got {:?}",
                            self.class_groups
                        )));
                    }
                }
                Ok(())
            }
            MeasurementMode::Hamiltonian => match &self.hamiltonian {
                Some(h) if h.n_qubits() == n_qubits => Ok(()),
                Some(h) => Err(Error::Shape(format!(
                    "Hamiltonian on {} qubits, circuit has {n_qubits}",
                    h.n_qubits()
                ))),
                None => Err(Error::Config("Hamiltonian readout without a Hamiltonian".into())),
            },
        }
    }

    pub fn n_outputs(&self, n_qubits: usize) -> usize {
        match self.mode {
            MeasurementMode::PerQubitZ => n_qubits,
            MeasurementMode::PairedSum => self.class_groups.len(),
            MeasurementMode::Hamiltonian => self.hamiltonian.as_ref().map_or(0, |h| h.terms().len()),
        }
    }

    /// Outputs from per-qubit Z expectations (Z-based modes only).
    pub(crate) fn outputs_from_z(&self, z: &[f64]) -> Vec<f64> {
        match self.mode {
            MeasurementMode::PerQubitZ => z.to_vec(),
            MeasurementMode::PairedSum => self
                .class_groups
                .iter()
                .map(|g| g.iter().map(|&q| z[q]).sum())
                .collect(),
            MeasurementMode::Hamiltonian => unreachable!("Hamiltonian readout is not Z-based"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    n_blocks: usize,
    template: Option<TemplateKind>,
    encoder_kind: Option<EncoderKind>,
    encoder_gates: Vec<Gate>,
    trainable_gates: Vec<Gate>,
    measurement: MeasurementSpec,
    n_params: usize,
    /// Block of every parameter slot.
    slot_block: Vec<usize>,
    /// Trainable gate index owning every parameter slot.
    slot_gate: Vec<usize>,
}

impl Circuit {
    /// Assembles a circuit, checking wire ranges, slot bijection and block
    /// structure.
    pub fn new(
        n_qubits: usize,
        n_blocks: usize,
        trainable_gates: Vec<Gate>,
        measurement: MeasurementSpec,
    ) -> Result<Self> {
        let n_params = trainable_gates.iter().map(|g| g.slots.len()).sum();
        let mut slot_block = vec![usize::MAX; n_params];
        let mut slot_gate = vec![usize::MAX; n_params];
        for (gi, g) in trainable_gates.iter().enumerate() {
            check_gate_shape(g, n_qubits)?;
            if g.slots.len() != g.kind.n_params() {
                return Err(Error::Config(format!(
                    "{} gate with {} slots",
                    g.kind,
                    g.slots.len()
                )));
            }
            let block = match g.block {
                BlockTag::Block(b) if b < n_blocks => b,
                BlockTag::Block(b) => {
                    return Err(Error::Config(format!("block {b} >= n_blocks {n_blocks}")))
                }
                BlockTag::Prefix if g.slots.is_empty() => usize::MAX,
                BlockTag::Prefix => {
                    return Err(Error::Config("prefix gates cannot be trainable".into()))
                }
                BlockTag::Encoder => {
                    return Err(Error::Config("encoder gate in the trainable list".into()))
                }
            };
            for &s in &g.slots {
                if s >= n_params || slot_gate[s] != usize::MAX {
                    return Err(Error::Config(format!("slot {s} is out of range or reused")));
                }
                slot_gate[s] = gi;
                slot_block[s] = block;
            }
        }
        measurement.validate(n_qubits)?;
        Ok(Self {
            n_qubits,
            n_blocks,
            template: None,
            encoder_kind: None,
            encoder_gates: Vec::new(),
            trainable_gates,
            measurement,
            n_params,
            slot_block,
            slot_gate,
        })
    }

    pub(crate) fn with_template_kind(mut self, kind: TemplateKind) -> Self {
        self.template = Some(kind);
        self
    }

    /// Attaches an input encoder built by [`build_encoder`].
    pub fn with_encoder(mut self, kind: EncoderKind) -> Result<Self> {
        self.encoder_gates = build_encoder(kind, self.n_qubits)?;
        self.encoder_kind = Some(kind);
        Ok(self)
    }

    pub fn with_measurement(mut self, measurement: MeasurementSpec) -> Result<Self> {
        measurement.validate(self.n_qubits)?;
        self.measurement = measurement;
        Ok(self)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_blocks(&self) -> usize {
        self.n_blocks
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn n_features(&self) -> usize {
        self.encoder_gates.len()
    }

    pub fn template(&self) -> Option<TemplateKind> {
        self.template
    }

    pub fn encoder_kind(&self) -> Option<EncoderKind> {
        self.encoder_kind
    }

    pub fn encoder_gates(&self) -> &[Gate] {
        &self.encoder_gates
    }

    pub fn trainable_gates(&self) -> &[Gate] {
        &self.trainable_gates
    }

    pub fn measurement(&self) -> &MeasurementSpec {
        &self.measurement
    }

    /// Zero-initialised parameter table.
    pub fn zero_params(&self) -> Vec<f64> {
        vec![0.0; self.n_params]
    }

    pub fn slot_block(&self, slot: usize) -> usize {
        self.slot_block[slot]
    }

    /// Index into [`Circuit::trainable_gates`] of the gate owning `slot`.
    pub fn slot_gate(&self, slot: usize) -> usize {
        self.slot_gate[slot]
    }

    /// Encoder followed by trainable gates.
    pub fn all_gates(&self) -> impl Iterator<Item = &Gate> {
        self.encoder_gates.iter().chain(self.trainable_gates.iter())
    }

    pub fn n_outputs(&self) -> usize {
        self.measurement.n_outputs(self.n_qubits)
    }

    pub(crate) fn check_lengths(&self, input: &[f64], params: &[f64], mask: &SparsityMask) -> Result<()> {
        if input.len() != self.encoder_gates.len() {
            return Err(Error::Shape(format!(
                "input has {} features, encoder expects {}",
                input.len(),
                self.encoder_gates.len()
            )));
        }
        if params.len() != self.n_params || mask.len() != self.n_params {
            return Err(Error::Shape(format!(
                "params ({}) and mask ({}) must both have {} entries",
                params.len(),
                mask.len(),
                self.n_params
            )));
        }
        Ok(())
    }

    pub(crate) fn encoder_angles(&self, input: &[f64]) -> Vec<f64> {
        let kind = self.encoder_kind.unwrap_or(EncoderKind::Image16);
        self.encoder_gates
            .iter()
            .map(|g| kind.angle(input[g.feature.expect("encoder gate has a feature")]))
            .collect()
    }

    /// Parameter values with inactive slots pinned to 0.
    pub fn effective_angles(&self, params: &[f64], mask: &SparsityMask) -> Vec<f64> {
        params
            .iter()
            .enumerate()
            .map(|(i, &p)| if mask.is_active(i) { p } else { 0.0 })
            .collect()
    }

    /// Whether each trainable gate is present: non-parameterized gates always,
    /// parameterized gates while at least one slot is active.
    pub fn presence(&self, mask: &SparsityMask) -> Vec<bool> {
        self.trainable_gates
            .iter()
            .map(|g| g.slots.is_empty() || g.slots.iter().any(|&s| mask.is_active(s)))
            .collect()
    }

    /// Runs the circuit on `|0...0>`. `after_gate[i]` lists Pauli errors
    /// inserted after gate `i` of [`Circuit::all_gates`].
    pub(crate) fn prepare_state(
        &self,
        encoder_angles: &[f64],
        angles: &[f64],
        presence: &[bool],
        after_gate: Option<&[Vec<(usize, Pauli)>]>,
    ) -> StateVector {
        let mut state = StateVector::zero(self.n_qubits).expect("qubit count validated at build");
        let mut buf = [0.0; 3];
        let insert = |state: &mut StateVector, idx: usize| {
            if let Some(after) = after_gate {
                for &(w, p) in &after[idx] {
                    state.apply_pauli(p, w);
                }
            }
        };
        for (i, g) in self.encoder_gates.iter().enumerate() {
            state.apply_1q(&g.kind.matrix(&encoder_angles[i..i + 1]), g.wires[0]);
            insert(&mut state, i);
        }
        let offset = self.encoder_gates.len();
        for (i, g) in self.trainable_gates.iter().enumerate() {
            if !presence[i] {
                continue;
            }
            let k = g.slots.len();
            for (b, &s) in buf.iter_mut().zip(&g.slots) {
                *b = angles[s];
            }
            let m = g.kind.matrix(&buf[..k]);
            match g.wires.as_slice() {
                [w] => state.apply_1q(&m, *w),
                [a, b] => state.apply_2q(&m, *a, *b),
                _ => unreachable!(),
            }
            insert(&mut state, offset + i);
        }
        state
    }

    /// Noiseless readout of a prepared state.
    pub(crate) fn measure(&self, state: &StateVector) -> Vec<f64> {
        match self.measurement.mode {
            MeasurementMode::Hamiltonian => self
                .measurement
                .hamiltonian
                .as_ref()
                .expect("validated")
                .terms()
                .iter()
                .map(|(_, p)| state.expectation(p).expect("length validated"))
                .collect(),
            _ => self.measurement.outputs_from_z(&state.z_expectations()),
        }
    }

    /// Noiseless evaluation with explicit effective angles and presence.
    pub(crate) fn evaluate(
        &self,
        encoder_angles: &[f64],
        angles: &[f64],
        presence: &[bool],
    ) -> Vec<f64> {
        self.measure(&self.prepare_state(encoder_angles, angles, presence, None))
    }
}

fn check_gate_shape(g: &Gate, n_qubits: usize) -> Result<()> {
    if g.wires.len() != g.kind.n_wires() {
        return Err(Error::Wire(format!("{} needs {} wires", g.kind, g.kind.n_wires())));
    }
    if g.wires.iter().any(|&w| w >= n_qubits) || (g.wires.len() == 2 && g.wires[0] == g.wires[1]) {
        return Err(Error::Wire(format!("invalid wires {:?} for {}", g.wires, g.kind)));
    }
    Ok(())
}

/// Noiseless forward pass: measurement outputs for `input` under `params`
/// restricted by `mask`.
pub fn forward(circuit: &Circuit, input: &[f64], params: &[f64], mask: &SparsityMask) -> Result<Vec<f64>> {
    circuit.check_lengths(input, params, mask)?;
    let enc = circuit.encoder_angles(input);
    let angles = circuit.effective_angles(params, mask);
    Ok(circuit.evaluate(&enc, &angles, &circuit.presence(mask)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::GateMatrix;
    use crate::tasks::Hamiltonian;

    #[test]
    fn rxyz_zero_params_reads_sqrt_h_layer() {
        let c = build_template(TemplateKind::Rxyz, 4, 2).unwrap().with_encoder(EncoderKind::Image16).unwrap();
        let mask = SparsityMask::dense(&c);
        let out = forward(&c, &[0.0; 16], &c.zero_params(), &mask).unwrap();
        // Oracle: √H on |0> directly.
        let mut s = StateVector::zero(1).unwrap();
        s.apply_gate(&GateMatrix::sqrt_h(), &[0]).unwrap();
        let z = s.expectation_pauli_string("Z").unwrap();
        for v in out {
            assert!((v - z).abs() < 1e-12);
        }
        // Z expectation of √H|0> is 1/2.
        assert!((z - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fully_masked_equals_encoder_only() {
        let c = build_template(TemplateKind::Zzry, 4, 2).unwrap().with_encoder(EncoderKind::Image16).unwrap();
        let input: Vec<f64> = (0..16).map(|i| i as f64 / 16.0).collect();
        let params: Vec<f64> = (0..c.n_params()).map(|i| 0.3 + i as f64).collect();
        let empty = SparsityMask::empty(&c);
        let out = forward(&c, &input, &params, &empty).unwrap();
        let mut s = StateVector::zero(4).unwrap();
        for g in c.encoder_gates() {
            let a = EncoderKind::Image16.angle(input[g.feature.unwrap()]);
            s.apply_gate(&g.kind.matrix(&[a]), &g.wires).unwrap();
        }
        for (a, b) in out.iter().zip(s.z_expectations()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_input_encoder_is_identity() {
        let c = build_template(TemplateKind::Rxyz, 4, 1).unwrap().with_encoder(EncoderKind::Image16).unwrap();
        let empty = SparsityMask::empty(&c);
        let out = forward(&c, &[0.0; 16], &c.zero_params(), &empty).unwrap();
        // Only the √H layer acts.
        assert!(out.iter().all(|v| (v - 0.5).abs() < 1e-12));
    }

    #[test]
    fn empty_vqe_circuit_energy() {
        let h: Hamiltonian = "1.0 ZZ".parse().unwrap();
        let c = Circuit::new(2, 0, vec![], MeasurementSpec::hamiltonian(h)).unwrap();
        let mask = SparsityMask::dense(&c);
        let out = forward(&c, &[], &[], &mask).unwrap();
        assert_eq!(out, vec![1.0]);
    }

    #[test]
    fn length_mismatch_is_shape_error() {
        let c = build_template(TemplateKind::U3cu3, 4, 1).unwrap().with_encoder(EncoderKind::Image16).unwrap();
        let mask = SparsityMask::dense(&c);
        assert!(matches!(forward(&c, &[0.0; 3], &c.zero_params(), &mask), Err(Error::Shape(_))));
        assert!(matches!(forward(&c, &[0.0; 16], &[0.0; 2], &mask), Err(Error::Shape(_))));
    }

    #[test]
    fn slot_reuse_rejected() {
        let g = |s| Gate::trainable(GateKind::Rx, vec![0], vec![s], BlockTag::Block(0));
        let r = Circuit::new(1, 1, vec![g(0), g(0)], MeasurementSpec::per_qubit_z());
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn paired_groups_must_be_disjoint() {
        let c = build_template(TemplateKind::Rxyz, 4, 1).unwrap();
        let bad = MeasurementSpec::paired_sum(vec![vec![0, 1], vec![1, 2]]);
        assert!(c.with_measurement(bad).is_err());
    }
}
