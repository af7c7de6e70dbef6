use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::circuit::EncoderKind;
use crate::error::{Error, Result};
use crate::rng::{stream, stream_rng};

/// Labelled feature vectors for classification.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub features: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub n_classes: usize,
    pub encoder: EncoderKind,
}

impl Dataset {
    pub fn new(features: Vec<Vec<f64>>, labels: Vec<usize>, n_classes: usize, encoder: EncoderKind) -> Result<Self> {
        if features.is_empty() {
            return Err(Error::Validation("dataset is empty".into()));
        }
        if features.len() != labels.len() {
            return Err(Error::Shape(format!("{} feature rows, {} labels", features.len(), labels.len())));
        }
        let width = encoder.n_features();
        if let Some(row) = features.iter().position(|f| f.len() != width) {
            return Err(Error::Shape(format!(
                "row {row} has {} features, expected {width}",
                features[row].len()
            )));
        }
        if let Some(row) = labels.iter().position(|&l| l >= n_classes) {
            return Err(Error::Validation(format!("row {row}: label {} ≥ {n_classes} classes", labels[row])));
        }
        Ok(Self {
            features,
            labels,
            n_classes,
            encoder,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    fn subset(&self, rows: &[usize]) -> Self {
        Self {
            features: rows.iter().map(|&r| self.features[r].clone()).collect(),
            labels: rows.iter().map(|&r| self.labels[r]).collect(),
            n_classes: self.n_classes,
            encoder: self.encoder,
        }
    }

    /// Seeded shuffle into 80% training and 20% validation rows (at least one
    /// row each when the dataset has two or more rows).
    pub fn split_train_valid(&self, seed: u64) -> (Dataset, Dataset) {
        let mut rows: Vec<usize> = (0..self.len()).collect();
        rows.shuffle(&mut stream_rng(seed, stream::SPLIT, 0));
        let n_valid = if self.len() < 2 {
            0
        } else {
            ((self.len() as f64 * 0.2).round() as usize).clamp(1, self.len() - 1)
        };
        let (valid, train) = rows.split_at(n_valid);
        let mut train = train.to_vec();
        let mut valid = valid.to_vec();
        train.sort_unstable();
        valid.sort_unstable();
        (self.subset(&train), self.subset(&valid))
    }
}

/// Parses CSV rows of `label, f1, ..., fk`.
///
/// Image features must lie in `[0, 1]`; vowel features only need to be
/// finite. `n_classes` is one more than the largest label.
pub fn parse_dataset(text: &str, encoder: EncoderKind) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let width = encoder.n_features();
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line() as usize),
            msg: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.len() != width + 1 {
            return Err(Error::Shape(format!(
                "line {line}: {} fields, expected a label and {width} features",
                record.len()
            )));
        }
        let label: usize = record[0].parse().map_err(|_| Error::Parse {
            line,
            msg: format!("bad label {:?}", &record[0]),
        })?;
        let mut row = Vec::with_capacity(width);
        for field in record.iter().skip(1) {
            let v = f64::from_str(field).map_err(|_| Error::Parse {
                line,
                msg: format!("bad feature {field:?}"),
            })?;
            let ok = match encoder {
                EncoderKind::Image16 => (0.0..=1.0).contains(&v),
                EncoderKind::Vowel10 => v.is_finite(),
            };
            if !ok {
                return Err(Error::Parse {
                    line,
                    msg: format!("feature {v} out of range"),
                });
            }
            row.push(v);
        }
        labels.push(label);
        features.push(row);
    }
    let n_classes = labels.iter().max().map_or(0, |m| m + 1);
    Dataset::new(features, labels, n_classes, encoder)
}

pub fn load_dataset(path: &Path, encoder: EncoderKind) -> Result<Dataset> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_dataset(&text, encoder)
}

/// Synthetic 4×4 image tasks. Class `c` lights up a set of image columns;
/// with the image encoder column `j` lands on qubit `j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SynthKind {
    /// Columns {0,1} vs {2,3}.
    TwoClass16,
    /// Column `c` for class `c`.
    FourClass16,
}

impl SynthKind {
    pub fn n_classes(self) -> usize {
        match self {
            SynthKind::TwoClass16 => 2,
            SynthKind::FourClass16 => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SynthKind::TwoClass16 => "two_class_16",
            SynthKind::FourClass16 => "four_class_16",
        }
    }

    /// Mean image of class `c`, row-major.
    pub fn class_mean(self, c: usize) -> [f64; 16] {
        let lit = |col: usize| match self {
            SynthKind::TwoClass16 => col / 2 == c,
            SynthKind::FourClass16 => col == c,
        };
        std::array::from_fn(|i| if lit(i % 4) { 0.8 } else { 0.2 })
    }
}

impl FromStr for SynthKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two_class_16" => Ok(SynthKind::TwoClass16),
            "four_class_16" => Ok(SynthKind::FourClass16),
            other => Err(Error::Config(format!("unknown synthetic dataset {other:?}"))),
        }
    }
}

/// Gaussian clusters (σ = 0.1, clipped to `[0, 1]`) around each class mean,
/// `n_per_class` rows per class, classes interleaved.
pub fn synth_dataset(kind: SynthKind, n_per_class: usize, seed: u64) -> Result<Dataset> {
    synth_dataset_with_sigma(kind, n_per_class, 0.1, seed)
}

pub fn synth_dataset_with_sigma(kind: SynthKind, n_per_class: usize, sigma: f64, seed: u64) -> Result<Dataset> {
    if n_per_class == 0 {
        return Err(Error::Validation("synthetic dataset needs at least one row per class".into()));
    }
    if !(sigma >= 0.0 && sigma.is_finite()) {
        return Err(Error::Validation(format!("jitter σ = {sigma} must be finite and ≥ 0")));
    }
    let noise = Normal::new(0.0, sigma).map_err(|e| Error::Validation(e.to_string()))?;
    let mut rng = stream_rng(seed, stream::SYNTH, 0);
    let k = kind.n_classes();
    let mut features = Vec::with_capacity(n_per_class * k);
    let mut labels = Vec::with_capacity(n_per_class * k);
    for _ in 0..n_per_class {
        for c in 0..k {
            let mean = kind.class_mean(c);
            features.push(mean.iter().map(|m| (m + noise.sample(&mut rng)).clamp(0.0, 1.0)).collect());
            labels.push(c);
        }
    }
    Dataset::new(features, labels, k, EncoderKind::Image16)
}
