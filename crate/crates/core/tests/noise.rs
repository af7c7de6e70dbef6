use std::f64::consts::PI;

use quantumsea::circuit::{forward, BlockTag, Circuit, Gate, GateKind, MeasurementSpec};
use quantumsea::noise::{noisy_forward, PauliProbs};
use quantumsea::{NoiseModel, SparsityMask};

fn single_rx() -> Circuit {
    Circuit::new(
        1,
        1,
        vec![Gate::trainable(GateKind::Rx, vec![0], vec![0], BlockTag::Block(0))],
        MeasurementSpec::per_qubit_z(),
    )
    .unwrap()
}

#[test]
fn trajectory_mean_matches_pauli_channel() {
    // After RX(θ)|0>, an X or Y error flips <Z>: E = cos θ (1 − 2(px + py)).
    let c = single_rx();
    let mask = SparsityMask::dense(&c);
    let probs = PauliProbs {
        px: 0.05,
        py: 0.03,
        pz: 0.1,
    };
    let model = NoiseModel::uniform(probs, PauliProbs::uniform(0.0), 20_000, 7);
    let theta = 0.4 * PI;
    let got = noisy_forward(&c, &[], &[theta], &mask, &model).unwrap()[0];
    let want = theta.cos() * (1.0 - 2.0 * (probs.px + probs.py));
    // Per-trajectory values are ±cos θ: standard error ≈ 0.002.
    assert!((got - want).abs() < 0.01, "{got} vs {want}");
}

#[test]
fn readout_matches_confusion_algebra() {
    let c = single_rx();
    let mask = SparsityMask::dense(&c);
    let mut model = NoiseModel::noiseless();
    model.readout = vec![[[0.9, 0.1], [0.3, 0.7]]];
    let theta = 1.1;
    let p1 = (theta / 2.0f64).sin().powi(2);
    let p0 = 1.0 - p1;
    let observed0 = p0 * 0.9 + p1 * 0.3;
    let got = noisy_forward(&c, &[], &[theta], &mask, &model).unwrap()[0];
    assert!((got - (2.0 * observed0 - 1.0)).abs() < 1e-12);
}

#[test]
fn trivial_model_equals_noiseless_forward() {
    let c = single_rx();
    let mask = SparsityMask::dense(&c);
    let clean = forward(&c, &[], &[0.7], &mask).unwrap();
    let noisy = noisy_forward(&c, &[], &[0.7], &mask, &NoiseModel::noiseless()).unwrap();
    assert!((clean[0] - noisy[0]).abs() < 1e-12);
}
