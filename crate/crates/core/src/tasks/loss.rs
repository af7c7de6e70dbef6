use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How measurement outputs are reduced to a scalar loss.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossSpec {
    /// Softmax cross-entropy over class scores.
    CrossEntropy { target: usize },
    /// `Σ c_i · o_i` over per-term expectations.
    Energy { coefficients: Vec<f64> },
}

impl LossSpec {
    /// Loss value and its gradient with respect to the outputs.
    pub fn value_and_grad(&self, outputs: &[f64]) -> Result<(f64, Vec<f64>)> {
        match self {
            LossSpec::CrossEntropy { target } => qml_loss(outputs, *target),
            LossSpec::Energy { coefficients } => {
                if coefficients.len() != outputs.len() {
                    return Err(Error::Shape(format!(
                        "{} coefficients for {} outputs",
                        coefficients.len(),
                        outputs.len()
                    )));
                }
                let e = coefficients.iter().zip(outputs).map(|(c, o)| c * o).sum();
                Ok((e, coefficients.clone()))
            }
        }
    }
}

/// Softmax probabilities, shifted by the maximum score for stability.
pub fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exp: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let z: f64 = exp.iter().sum();
    exp.into_iter().map(|e| e / z).collect()
}

/// Cross-entropy of `softmax(scores)` against `target`, with `dL/dscores`.
pub fn qml_loss(scores: &[f64], target: usize) -> Result<(f64, Vec<f64>)> {
    if target >= scores.len() {
        return Err(Error::Shape(format!("target {target} out of range for {} classes", scores.len())));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::Validation("non-finite class score".into()));
    }
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_z = max + scores.iter().map(|s| (s - max).exp()).sum::<f64>().ln();
    let mut grad = softmax(scores);
    grad[target] -= 1.0;
    Ok((log_z - scores[target], grad))
}

/// Index of the largest score; ties go to the lowest index.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate() {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn uniform_scores() {
        let (l, g) = qml_loss(&[0.3; 4], 2).unwrap();
        assert!((l - 4f64.ln()).abs() < 1e-14);
        assert!(g[2] < 0.0 && g[0] > 0.0);
    }

    #[test]
    fn saturated_scores() {
        let (l, _) = qml_loss(&[0.0, 10.0], 1).unwrap();
        assert!(l < 1e-3);
    }

    #[test]
    fn rejects_bad_target() {
        assert!(qml_loss(&[0.0, 1.0], 2).is_err());
        assert!(qml_loss(&[f64::NAN, 1.0], 0).is_err());
    }

    #[test]
    fn energy_loss_is_linear() {
        let spec = LossSpec::Energy { coefficients: vec![2.0, -1.0] };
        let (e, g) = spec.value_and_grad(&[0.5, 0.25]).unwrap();
        assert_eq!(e, 0.75);
        assert_eq!(g, vec![2.0, -1.0]);
        assert!(spec.value_and_grad(&[0.5]).is_err());
    }

    proptest! {
        #[test]
        fn gradient_matches_differences(scores in prop::collection::vec(-3.0f64..3.0, 2..6), t in 0usize..6) {
            let t = t % scores.len();
            let (_, g) = qml_loss(&scores, t).unwrap();
            let h = 1e-5;
            for k in 0..scores.len() {
                let mut up = scores.clone();
                up[k] += h;
                let mut down = scores.clone();
                down[k] -= h;
                // Independent oracle: naive log-sum-exp.
                let f = |s: &[f64]| s.iter().map(|x| x.exp()).sum::<f64>().ln() - s[t];
                let fd = (f(&up) - f(&down)) / (2.0 * h);
                prop_assert!((fd - g[k]).abs() < 1e-8);
            }
        }
    }
}
