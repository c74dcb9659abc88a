//! Dataset loading and synthetic generation.
//!
//! The CSV format is one header line, one row per sample, features as
//! numbers and the class label in the last column. The named generators
//! produce stand-ins with the feature count, class count and split sizes
//! of the public benchmark datasets, for use when the real CSVs are not
//! present; the loaders accept the real data wherever a path is given.

use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream_rng, SimRng};

/// A labeled feature matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dataset {
    /// Row-major n_samples × n_features.
    pub features: Vec<f64>,
    pub labels: Vec<usize>,
    pub n_features: usize,
    pub n_classes: usize,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn sample(&self, i: usize) -> &[f64] {
        &self.features[i * self.n_features..(i + 1) * self.n_features]
    }

    /// Load from CSV: header line, label in the last column. Labels may be
    /// arbitrary integers or strings; they are mapped to dense indices in
    /// first-seen order.
    pub fn from_csv(path: &Path) -> Result<Dataset> {
        let file = std::fs::File::open(path)?;
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(file);
        let mut features = Vec::new();
        let mut labels = Vec::new();
        let mut label_map: Vec<String> = Vec::new();
        let mut n_features: Option<usize> = None;
        for (idx, record) in rdr.records().enumerate() {
            let lineno = idx + 2;
            let record = record.map_err(|e| Error::Parse {
                line: lineno,
                msg: e.to_string(),
            })?;
            if record.len() < 2 {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "need at least one feature and a label".into(),
                });
            }
            let nf = record.len() - 1;
            match n_features {
                None => n_features = Some(nf),
                Some(expect) if expect != nf => {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("expected {expect} features, found {nf}"),
                    })
                }
                _ => {}
            }
            for v in record.iter().take(nf) {
                features.push(v.trim().parse::<f64>().map_err(|e| Error::Parse {
                    line: lineno,
                    msg: format!("bad feature value '{v}': {e}"),
                })?);
            }
            let raw_label = record.get(nf).unwrap().trim().to_string();
            let label = match label_map.iter().position(|l| *l == raw_label) {
                Some(i) => i,
                None => {
                    label_map.push(raw_label);
                    label_map.len() - 1
                }
            };
            labels.push(label);
        }
        let n_features = n_features.ok_or_else(|| Error::Shape("CSV has no data rows".into()))?;
        Ok(Dataset {
            features,
            labels,
            n_features,
            n_classes: label_map.len(),
        })
    }
}

/// A train/test partition.
#[derive(Debug, Clone)]
pub struct Split {
    pub train: Dataset,
    pub test: Dataset,
}

impl Split {
    /// Load a pre-split pair of CSVs. Class counts are unified.
    pub fn from_csv_pair(train_path: &Path, test_path: &Path) -> Result<Split> {
        let mut train = Dataset::from_csv(train_path)?;
        let mut test = Dataset::from_csv(test_path)?;
        if train.n_features != test.n_features {
            return Err(Error::Shape(format!(
                "train has {} features, test has {}",
                train.n_features, test.n_features
            )));
        }
        let k = train.n_classes.max(test.n_classes);
        train.n_classes = k;
        test.n_classes = k;
        Ok(Split { train, test })
    }
}

/// Parameters of the synthetic class-cluster generator.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n_features: usize,
    pub n_classes: usize,
    pub train_size: usize,
    pub test_size: usize,
    /// Scale of the class-mean offsets relative to the unit within-class
    /// noise; smaller values give a harder task.
    pub separation: f64,
    /// Per-class spread multipliers are drawn uniformly from
    /// [1 − scatter_spread, 1 + scatter_spread].
    pub scatter_spread: f64,
    /// Per-class signal-energy multipliers drawn uniformly from
    /// [1 − energy_spread, 1 + energy_spread]; classes differ in overall
    /// magnitude the way loud and quiet signal sources do.
    pub energy_spread: f64,
    /// Fraction of samples assigned to class 0; the rest are spread
    /// uniformly. 0 means balanced classes.
    pub class_skew: f64,
    pub seed: u64,
}

/// Draw one split of the synthetic task: Gaussian class clusters in
/// feature space with uneven per-class spreads and signal energies.
pub fn synthetic_split(spec: &SyntheticSpec) -> Split {
    let mut rng = stream_rng(spec.seed, 0);
    let k = spec.n_classes;
    let n = spec.n_features;
    let unit = Normal::new(0.0, 1.0).unwrap();
    let energy: Vec<f64> = (0..k)
        .map(|_| 1.0 + spec.energy_spread * rng.gen_range(-1.0..1.0))
        .collect();
    let means: Vec<Vec<f64>> = (0..k)
        .map(|c| {
            (0..n)
                .map(|_| energy[c] * spec.separation * unit.sample(&mut rng) / (n as f64).sqrt())
                .collect()
        })
        .collect();
    let scatter: Vec<f64> = (0..k)
        .map(|c| energy[c] * (1.0 + spec.scatter_spread * rng.gen_range(-1.0..1.0)))
        .collect();

    let draw = |rng: &mut SimRng, size: usize, part: u64| -> Dataset {
        let mut features = Vec::with_capacity(size * n);
        let mut labels = Vec::with_capacity(size);
        let mut sample_rng = stream_rng(spec.seed, 1 + part);
        for _ in 0..size {
            let c = if spec.class_skew > 0.0 && rng.gen_bool(spec.class_skew.min(1.0)) {
                0
            } else {
                rng.gen_range(0..k)
            };
            for j in 0..n {
                features
                    .push(means[c][j] + scatter[c] * unit.sample(&mut sample_rng) / (n as f64).sqrt());
            }
            labels.push(c);
        }
        Dataset {
            features,
            labels,
            n_features: n,
            n_classes: k,
        }
    };
    let train = draw(&mut rng, spec.train_size, 0);
    let test = draw(&mut rng, spec.test_size, 1);
    Split { train, test }
}

/// Stand-in with the ISOLET shape: 617 features, 26 classes, 6238 train
/// and 1559 test samples. Difficulty is calibrated so hypervector
/// classification lands in the high-90s at D = 1024 with a visible drop
/// at smaller D.
pub fn isolet_like(seed: u64) -> Split {
    synthetic_split(&SyntheticSpec {
        n_features: 617,
        n_classes: 26,
        train_size: 6238,
        test_size: 1559,
        separation: 1.0,
        scatter_spread: 0.3,
        energy_spread: 0.95,
        class_skew: 0.0,
        seed,
    })
}

/// Stand-in with the UCIHAR shape: 561 features, 12 classes, 6213 train
/// and 1554 test samples.
pub fn ucihar_like(seed: u64) -> Split {
    synthetic_split(&SyntheticSpec {
        n_features: 561,
        n_classes: 12,
        train_size: 6213,
        test_size: 1554,
        separation: 0.8,
        scatter_spread: 0.3,
        energy_spread: 0.95,
        class_skew: 0.0,
        seed,
    })
}

/// Two-class stand-in with the FACE feature width (608) and a skewed
/// class balance; sizes are scaled down from the original split.
pub fn face_like(seed: u64) -> Split {
    synthetic_split(&SyntheticSpec {
        n_features: 608,
        n_classes: 2,
        train_size: 20_000,
        test_size: 2494,
        separation: 1.2,
        scatter_spread: 0.2,
        energy_spread: 0.5,
        class_skew: 0.8,
        seed,
    })
}

/// Cleanly separated clusters for smoke tests: any sensible metric
/// classifies these perfectly.
pub fn well_separated(n_classes: usize, per_class: usize, n_features: usize, seed: u64) -> Split {
    synthetic_split(&SyntheticSpec {
        n_features,
        n_classes,
        train_size: n_classes * per_class,
        test_size: n_classes * per_class / 2,
        separation: 12.0,
        scatter_spread: 0.0,
        energy_spread: 0.0,
        class_skew: 0.0,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "f0,f1,label").unwrap();
        writeln!(f, "0.5,-1.25,cat").unwrap();
        writeln!(f, "1.5,2.0,dog").unwrap();
        writeln!(f, "0.25,0.0,cat").unwrap();
        drop(f);
        let d = Dataset::from_csv(&path).unwrap();
        assert_eq!(d.n_features, 2);
        assert_eq!(d.n_classes, 2);
        assert_eq!(d.labels, vec![0, 1, 0]);
        assert_eq!(d.sample(1), &[1.5, 2.0]);
    }

    #[test]
    fn csv_errors_carry_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        let mut f = std::fs::File::create(&path).unwrap();
        writeln!(f, "f0,f1,label").unwrap();
        writeln!(f, "0.5,1.0,a").unwrap();
        writeln!(f, "oops,1.0,b").unwrap();
        drop(f);
        match Dataset::from_csv(&path) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn synthetic_is_deterministic_and_shaped() {
        let a = isolet_like(5);
        let b = isolet_like(5);
        assert_eq!(a.train.features, b.train.features);
        assert_eq!(a.train.len(), 6238);
        assert_eq!(a.test.len(), 1559);
        assert_eq!(a.train.n_features, 617);
        assert_eq!(a.train.n_classes, 26);
        let c = isolet_like(6);
        assert_ne!(a.train.features, c.train.features);
    }

    #[test]
    fn skewed_generator_prefers_class_zero() {
        let s = face_like(1);
        let zeros = s.train.labels.iter().filter(|l| **l == 0).count();
        assert!(zeros as f64 / s.train.len() as f64 > 0.7);
        assert_eq!(s.train.n_features, 608);
        assert_eq!(s.train.n_classes, 2);
    }
}
