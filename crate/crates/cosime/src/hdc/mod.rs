//! Hyperdimensional-computing classification harness.
//!
//! Encoding is sign-of-random-projection: D pseudo-random ±1 projection
//! rows derived from a seed, bit d set iff the projection of the
//! standardized feature vector is non-negative. Projection rows depend
//! only on (seed, row index), so a smaller dimensionality is exactly a
//! prefix of a larger one. Training is a single pass: each class
//! hypervector is the bitwise majority of its encoded training samples
//! (ties set to 1). Inference searches the class hypervectors with an
//! exact cosine oracle, a Hamming oracle, or the simulated in-memory
//! search chain (arrays → translinear → WTA).

pub mod dataset;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::array::{program, scale_for_iy_target, ArrayGeometry, BinaryVector};
use crate::device::VariationSpec;
use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::translinear::row_similarities;
use crate::variation::McPipeline;
use crate::wta::{solve_static, WtaConfig};
use dataset::{Dataset, Split};

/// A similarity value plus a degenerate-input flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Similarity {
    pub value: f64,
    /// Set when either vector had no ones; the value is defined as 0.
    pub zero_vector: bool,
}

/// Cosine similarity of two binary vectors:
/// dot / (√popcount(a) · √popcount(b)). A zero vector yields 0 with a flag.
pub fn exact_cosine(a: &BinaryVector, b: &BinaryVector) -> Result<Similarity> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!(
            "cosine of lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    let (na, nb) = (a.popcount() as f64, b.popcount() as f64);
    if na == 0.0 || nb == 0.0 {
        return Ok(Similarity {
            value: 0.0,
            zero_vector: true,
        });
    }
    Ok(Similarity {
        value: a.dot(b) as f64 / (na * nb).sqrt(),
        zero_vector: false,
    })
}

/// Squared cosine: dot² / (popcount(a) · popcount(b)).
pub fn exact_cos_sq(a: &BinaryVector, b: &BinaryVector) -> Result<Similarity> {
    let s = exact_cosine(a, b)?;
    Ok(Similarity {
        value: s.value * s.value,
        zero_vector: s.zero_vector,
    })
}

/// Hamming distance.
pub fn hamming(a: &BinaryVector, b: &BinaryVector) -> Result<u32> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!(
            "hamming of lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    Ok(a.hamming(b))
}

/// Per-feature standardization statistics, fit on the training split only.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureScaler {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl FeatureScaler {
    pub fn fit(train: &Dataset) -> FeatureScaler {
        let n = train.n_features;
        let count = train.len().max(1) as f64;
        let mut mean = vec![0.0; n];
        for i in 0..train.len() {
            for (m, v) in mean.iter_mut().zip(train.sample(i)) {
                *m += v;
            }
        }
        for m in mean.iter_mut() {
            *m /= count;
        }
        let mut var = vec![0.0; n];
        for i in 0..train.len() {
            for ((s, v), m) in var.iter_mut().zip(train.sample(i)).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        let std = var
            .into_iter()
            .map(|v| {
                let s = (v / count).sqrt();
                if s > 0.0 {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        FeatureScaler { mean, std }
    }

    pub fn apply(&self, features: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(
            features
                .iter()
                .zip(&self.mean)
                .zip(&self.std)
                .map(|((x, m), s)| (x - m) / s),
        );
    }
}

/// Encoding families.
///
/// `SignProjection` sets bit d iff projection row d of the standardized
/// features is non-negative; it yields norm-balanced hypervectors (every
/// popcount concentrates at D/2), under which cosine and Hamming rankings
/// nearly coincide. `LevelProjection` thermometer-codes each projection
/// into `quantization` ordered threshold bits, so popcounts carry the
/// projection magnitudes; that is the regime where the cosine
/// normalization genuinely outperforms Hamming distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EncoderKind {
    #[default]
    SignProjection,
    LevelProjection,
}

/// Encoder configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Encoder {
    pub projection_seed: u64,
    pub n_features: usize,
    /// Hypervector dimensionality D.
    pub dim: usize,
    /// Feature discretization levels. For `LevelProjection` this is the
    /// thermometer depth per projection (D must be a multiple of it).
    /// For `SignProjection`, a nonzero value quantizes the standardized
    /// features onto this many uniform levels over ±3σ first; 0 disables
    /// that.
    pub quantization: usize,
    pub kind: EncoderKind,
}

impl Default for Encoder {
    fn default() -> Self {
        Self {
            projection_seed: 0,
            n_features: 0,
            dim: 1024,
            quantization: 0,
            kind: EncoderKind::SignProjection,
        }
    }
}

/// An encoder with its projection rows materialized and the training-split
/// scaler attached.
pub struct CompiledEncoder {
    pub cfg: Encoder,
    pub scaler: FeatureScaler,
    /// Row-major n_rows × n_features matrix of ±1 signs. One row per bit
    /// for sign encoding, one per direction for level encoding.
    signs: Vec<f64>,
    /// Ordered thermometer thresholds (level encoding only).
    thresholds: Vec<f64>,
}

impl Encoder {
    fn levels(&self) -> usize {
        if self.quantization == 0 {
            16
        } else {
            self.quantization
        }
    }

    /// Materialize the ±1 projection rows. Row d is generated from
    /// (projection_seed, d), so encoders of different dimensionality but
    /// equal seed agree on their common prefix.
    pub fn compile(&self, scaler: FeatureScaler) -> Result<CompiledEncoder> {
        if self.n_features == 0 || self.dim == 0 {
            return Err(Error::Config("encoder needs n_features > 0 and dim > 0".into()));
        }
        if scaler.mean.len() != self.n_features {
            return Err(Error::Shape(format!(
                "scaler has {} features, encoder expects {}",
                scaler.mean.len(),
                self.n_features
            )));
        }
        let n = self.n_features;
        let (n_rows, thresholds) = match self.kind {
            EncoderKind::SignProjection => (self.dim, Vec::new()),
            EncoderKind::LevelProjection => {
                let levels = self.levels();
                if self.dim % levels != 0 {
                    return Err(Error::Config(format!(
                        "level encoding needs dim ({}) divisible by the level count ({levels})",
                        self.dim
                    )));
                }
                // A ±1 row dotted with standardized features has standard
                // deviation ≈ √n. Positive thresholds spread over
                // (0, 2.5σ] make the bit count grow with the projection
                // magnitude, so hypervector norms carry signal energy.
                let sigma = (n as f64).sqrt();
                let t = (0..levels)
                    .map(|l| sigma * 2.5 * (l as f64 + 0.5) / levels as f64)
                    .collect();
                (self.dim / levels, t)
            }
        };
        let mut signs = vec![0.0; n_rows * n];
        signs
            .par_chunks_mut(n)
            .enumerate()
            .for_each(|(d, row)| {
                let mut rng = stream_rng(self.projection_seed, d as u64);
                for s in row.iter_mut() {
                    *s = if rand::Rng::gen::<bool>(&mut rng) { 1.0 } else { -1.0 };
                }
            });
        Ok(CompiledEncoder {
            cfg: self.clone(),
            scaler,
            signs,
            thresholds,
        })
    }
}

impl CompiledEncoder {
    fn quantize(&self, x: f64) -> f64 {
        let levels = self.cfg.quantization;
        if levels == 0 {
            return x;
        }
        let clamped = x.clamp(-3.0, 3.0);
        let step = 6.0 / levels as f64;
        ((clamped + 3.0) / step).floor().min(levels as f64 - 1.0) * step - 3.0 + step / 2.0
    }

    /// Encode one raw feature vector.
    pub fn encode(&self, features: &[f64]) -> Result<BinaryVector> {
        if features.len() != self.cfg.n_features {
            return Err(Error::Shape(format!(
                "feature vector has {} entries, encoder expects {}",
                features.len(),
                self.cfg.n_features
            )));
        }
        let mut std = Vec::new();
        self.scaler.apply(features, &mut std);
        let n = self.cfg.n_features;
        let mut out = BinaryVector::zeros(self.cfg.dim);
        match self.cfg.kind {
            EncoderKind::SignProjection => {
                for v in std.iter_mut() {
                    *v = self.quantize(*v);
                }
                for d in 0..self.cfg.dim {
                    let row = &self.signs[d * n..(d + 1) * n];
                    let dot: f64 = row.iter().zip(&std).map(|(s, x)| s * x).sum();
                    if dot >= 0.0 {
                        out.set(d, true);
                    }
                }
            }
            EncoderKind::LevelProjection => {
                let levels = self.thresholds.len();
                for k in 0..self.cfg.dim / levels {
                    let row = &self.signs[k * n..(k + 1) * n];
                    let dot: f64 = row.iter().zip(&std).map(|(s, x)| s * x).sum();
                    for (l, t) in self.thresholds.iter().enumerate() {
                        if dot >= *t {
                            out.set(k * levels + l, true);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// Encode a whole dataset in parallel (deterministic per sample).
    pub fn encode_dataset(&self, data: &Dataset) -> Result<Vec<BinaryVector>> {
        (0..data.len())
            .into_par_iter()
            .map(|i| self.encode(data.sample(i)))
            .collect()
    }
}

/// Trained classifier: one hypervector per class.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HdcModel {
    pub version: u32,
    pub encoder: Encoder,
    pub scaler: FeatureScaler,
    /// Class hypervectors, indexed by class.
    pub classes: Vec<BinaryVector>,
    /// Training samples per class.
    pub train_counts: Vec<usize>,
}

impl HdcModel {
    pub fn dim(&self) -> usize {
        self.encoder.dim
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<HdcModel> {
        let model: HdcModel =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("model file: {e}")))?;
        if model.version != 1 {
            return Err(Error::Config(format!(
                "unsupported model version {}",
                model.version
            )));
        }
        Ok(model)
    }

    /// Model restricted to the first `dim` bits (valid because projection
    /// rows are prefix-stable and per-bit majorities are independent).
    pub fn truncated(&self, dim: usize) -> Result<HdcModel> {
        if dim == 0 || dim > self.dim() {
            return Err(Error::Shape(format!(
                "cannot truncate a {}-bit model to {dim} bits",
                self.dim()
            )));
        }
        Ok(HdcModel {
            version: self.version,
            encoder: Encoder {
                dim,
                ..self.encoder.clone()
            },
            scaler: self.scaler.clone(),
            classes: self.classes.iter().map(|c| truncate(c, dim)).collect(),
            train_counts: self.train_counts.clone(),
        })
    }
}

fn truncate(v: &BinaryVector, dim: usize) -> BinaryVector {
    BinaryVector::from_bits((0..dim).map(|i| v.get(i)))
}

/// Bitwise-majority class vectors from pre-encoded samples; ties go to 1.
pub fn train_from_encodings(
    encodings: &[BinaryVector],
    labels: &[usize],
    n_classes: usize,
    dim: usize,
) -> Result<Vec<BinaryVector>> {
    let mut counts = vec![0usize; n_classes];
    let mut ones = vec![vec![0u32; dim]; n_classes];
    for (enc, &label) in encodings.iter().zip(labels) {
        counts[label] += 1;
        let per_class = &mut ones[label];
        for d in 0..dim {
            if enc.get(d) {
                per_class[d] += 1;
            }
        }
    }
    if let Some(empty) = counts.iter().position(|c| *c == 0) {
        return Err(Error::EmptyClass(empty));
    }
    Ok(ones
        .iter()
        .zip(&counts)
        .map(|(per_bit, &count)| {
            BinaryVector::from_bits((0..dim).map(|d| 2 * per_bit[d] as usize >= count))
        })
        .collect())
}

/// Single-pass training: standardize on the training split, encode every
/// sample, and take per-class bitwise majorities.
pub fn train_single_pass(train: &Dataset, enc: &Encoder) -> Result<HdcModel> {
    if train.is_empty() {
        return Err(Error::Shape("empty training set".into()));
    }
    let enc = Encoder {
        n_features: train.n_features,
        ..enc.clone()
    };
    let scaler = FeatureScaler::fit(train);
    let compiled = enc.compile(scaler.clone())?;
    let encodings = compiled.encode_dataset(train)?;
    let classes = train_from_encodings(&encodings, &train.labels, train.n_classes, enc.dim)?;
    let mut train_counts = vec![0usize; train.n_classes];
    for &l in &train.labels {
        train_counts[l] += 1;
    }
    Ok(HdcModel {
        version: 1,
        encoder: enc,
        scaler,
        classes,
        train_counts,
    })
}

/// Inference backends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    OracleCosine,
    OracleHamming,
    SimulatedAm,
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::OracleCosine => "cosine",
            Backend::OracleHamming => "hamming",
            Backend::SimulatedAm => "simulated_am",
        }
    }
}

/// Margin-gated winner-flip injection. Flips happen with probability
/// `rate` at margins below `margin_floor`, decaying exponentially above
/// it — the same shape as the measured hardware error curve, which is
/// concentrated where the top-2 similarity gap is small.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ErrorInjection {
    /// Peak winner-flip probability (the near-tie error rate of the AM).
    pub rate: f64,
    /// Margin below which the full rate applies. Default: the WTA
    /// resolution target, 1%.
    pub margin_floor: f64,
    /// Decay scale of the flip probability above the floor.
    pub margin_scale: f64,
    pub seed: u64,
}

impl Default for ErrorInjection {
    fn default() -> Self {
        Self {
            rate: 0.0,
            margin_floor: 0.01,
            margin_scale: 0.05,
            seed: 0,
        }
    }
}

impl ErrorInjection {
    pub fn flip_probability(&self, margin: f64) -> f64 {
        if margin <= self.margin_floor {
            self.rate
        } else {
            self.rate * (-(margin - self.margin_floor) / self.margin_scale).exp()
        }
    }
}

/// Options of the simulated-AM backend.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AmOptions {
    pub pipeline: McPipeline,
    pub variation: VariationSpec,
    /// Row current the resistor tuning targets for the largest class norm.
    pub iy_target: f64,
    pub seed: u64,
    pub error_injection: Option<ErrorInjection>,
}

impl Default for AmOptions {
    fn default() -> Self {
        Self {
            pipeline: McPipeline::default(),
            variation: VariationSpec::zero(),
            iy_target: 600e-9,
            seed: 0,
            error_injection: None,
        }
    }
}

/// A programmed associative-memory instance holding the class vectors.
pub struct SimulatedAm {
    arr: crate::array::ArrayInstance,
    supply: f64,
    opts: AmOptions,
    wta: WtaConfig,
}

/// One AM search outcome.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct AmDecision {
    pub winner: usize,
    pub runner_up: usize,
    /// Relative top-2 gap of the translinear outputs.
    pub margin: f64,
    pub converged: bool,
}

impl SimulatedAm {
    /// Program the class hypervectors into the array pair, sampling the
    /// configured variation once (the chip is programmed once; queries
    /// share the instance).
    pub fn program_model(model: &HdcModel, opts: &AmOptions) -> Result<SimulatedAm> {
        if model.classes.len() < 2 {
            return Err(Error::Shape("simulated AM needs at least 2 classes".into()));
        }
        let max_norm = model
            .classes
            .iter()
            .map(|c| c.popcount())
            .max()
            .unwrap_or(1)
            .max(1);
        let scale = scale_for_iy_target(&opts.pipeline.cell, max_norm, opts.iy_target);
        let geometry = ArrayGeometry::new(model.classes.len(), model.dim()).with_scale(scale);
        let mut rng = stream_rng(opts.seed, 0);
        let supply = opts.variation.sample_supply_factor(&mut rng);
        let arr = program(
            model.classes.clone(),
            geometry,
            &opts.pipeline.cell,
            &opts.variation,
            &mut rng,
        )?;
        let wta = WtaConfig {
            m: model.classes.len(),
            ..opts.pipeline.wta.clone()
        };
        Ok(SimulatedAm {
            arr,
            supply,
            opts: opts.clone(),
            wta,
        })
    }

    /// Run one search. A zero dot-product row is lifted to a relative
    /// current floor so the solver sees positive rail inputs; such rows
    /// cannot win.
    pub fn search(&self, query: &BinaryVector) -> Result<AmDecision> {
        let rc = self.arr.row_currents_scaled(query, self.supply)?;
        let sims = row_similarities(&rc.ix, &rc.iy, &self.opts.pipeline.translinear)?;
        let mut iz: Vec<f64> = sims.iter().map(|s| s.iz).collect();
        let max_iz = iz.iter().cloned().fold(0.0f64, f64::max);
        if max_iz <= 0.0 {
            return Err(Error::Domain("query matches no stored bit".into()));
        }
        for z in iz.iter_mut() {
            *z = z.max(max_iz * 1e-12);
        }
        let sol = solve_static(&iz, &self.wta)?;
        let mut order: Vec<usize> = (0..iz.len()).collect();
        order.sort_by(|&a, &b| iz[b].partial_cmp(&iz[a]).unwrap());
        let runner_up = order[1];
        let margin = (iz[order[0]] - iz[runner_up]) / iz[order[0]];
        Ok(AmDecision {
            winner: sol.winner,
            runner_up,
            margin,
            converged: sol.converged,
        })
    }
}

fn argmax_f64(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, s) in scores.iter().enumerate().skip(1) {
        if *s > scores[best] {
            best = i;
        }
    }
    best
}

/// Classify one encoded query against the model's class vectors.
pub fn classify_encoding(
    encoding: &BinaryVector,
    model: &HdcModel,
    backend: Backend,
    am: Option<&SimulatedAm>,
) -> Result<usize> {
    match backend {
        Backend::OracleCosine => {
            let scores: Result<Vec<f64>> = model
                .classes
                .iter()
                .map(|c| Ok(exact_cosine(encoding, c)?.value))
                .collect();
            Ok(argmax_f64(&scores?))
        }
        Backend::OracleHamming => {
            let mut best = 0usize;
            let mut best_d = u32::MAX;
            for (i, c) in model.classes.iter().enumerate() {
                let d = hamming(encoding, c)?;
                if d < best_d {
                    best_d = d;
                    best = i;
                }
            }
            Ok(best)
        }
        Backend::SimulatedAm => {
            let am = am.ok_or_else(|| {
                Error::Config("simulated_am backend needs a programmed instance".into())
            })?;
            let decision = am.search(encoding)?;
            if !decision.converged {
                return Err(Error::NonConvergence { residual: f64::NAN });
            }
            Ok(decision.winner)
        }
    }
}

/// Classify raw features with a model.
pub fn infer(
    features: &[f64],
    model: &HdcModel,
    backend: Backend,
    am: Option<&SimulatedAm>,
) -> Result<usize> {
    let compiled = model.encoder.compile(model.scaler.clone())?;
    let encoding = compiled.encode(features)?;
    classify_encoding(&encoding, model, backend, am)
}

/// One accuracy measurement.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AccuracyRow {
    pub dim: usize,
    pub metric: String,
    pub accuracy: f64,
    /// Queries the backend failed on (counted as wrong).
    pub backend_failures: usize,
}

/// Evaluate accuracy over hypervector dimensionalities and backends.
///
/// The encoder is compiled once at the largest dimensionality; smaller
/// ones reuse prefixes of the same projections, so the sweep isolates the
/// effect of D.
pub fn evaluate(
    split: &Split,
    enc: &Encoder,
    dims: &[usize],
    backends: &[Backend],
    am_opts: &AmOptions,
) -> Result<Vec<AccuracyRow>> {
    if dims.is_empty() || backends.is_empty() {
        return Err(Error::Config("evaluate needs at least one dim and one backend".into()));
    }
    let max_dim = *dims.iter().max().unwrap();
    let enc_full = Encoder {
        dim: max_dim,
        n_features: split.train.n_features,
        ..enc.clone()
    };
    let model_full = train_single_pass(&split.train, &enc_full)?;
    let compiled = enc_full.compile(model_full.scaler.clone())?;
    let test_encodings = compiled.encode_dataset(&split.test)?;

    let mut rows = Vec::new();
    for &dim in dims {
        let model = model_full.truncated(dim)?;
        let test_at_dim: Vec<BinaryVector> = if dim == max_dim {
            test_encodings.clone()
        } else {
            test_encodings.par_iter().map(|e| truncate(e, dim)).collect()
        };
        for &backend in backends {
            let am = match backend {
                Backend::SimulatedAm => Some(SimulatedAm::program_model(&model, am_opts)?),
                _ => None,
            };
            let injection = am_opts.error_injection.as_ref().filter(|inj| {
                backend == Backend::SimulatedAm && inj.rate > 0.0
            });
            let mut correct = 0usize;
            let mut failures = 0usize;
            let results: Vec<Result<usize>> = match backend {
                Backend::SimulatedAm => test_at_dim
                    .par_iter()
                    .enumerate()
                    .map(|(i, e)| {
                        let am = am.as_ref().unwrap();
                        let d = am.search(e)?;
                        if !d.converged {
                            return Err(Error::NonConvergence { residual: f64::NAN });
                        }
                        if let Some(inj) = injection {
                            let mut rng = stream_rng(inj.seed, i as u64);
                            let p = inj.flip_probability(d.margin);
                            if p > 0.0 && rand::Rng::gen::<f64>(&mut rng) < p {
                                return Ok(d.runner_up);
                            }
                        }
                        Ok(d.winner)
                    })
                    .collect(),
                _ => test_at_dim
                    .par_iter()
                    .map(|e| classify_encoding(e, &model, backend, None))
                    .collect(),
            };
            for (res, &label) in results.iter().zip(&split.test.labels) {
                match res {
                    Ok(pred) if *pred == label => correct += 1,
                    Ok(_) => {}
                    Err(_) => failures += 1,
                }
            }
            rows.push(AccuracyRow {
                dim,
                metric: backend.name().to_string(),
                accuracy: correct as f64 / split.test.len() as f64,
                backend_failures: failures,
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use dataset::well_separated;

    fn bv(s: &str) -> BinaryVector {
        s.parse().unwrap()
    }

    #[test]
    fn cosine_basics() {
        let a = bv("1100");
        let b = bv("1010");
        assert_eq!(exact_cosine(&a, &a).unwrap().value, 1.0);
        let s = exact_cosine(&a, &b).unwrap();
        assert!((s.value - 0.5).abs() < 1e-15);
        assert!((exact_cos_sq(&a, &b).unwrap().value - 0.25).abs() < 1e-15);
        // Disjoint supports are orthogonal.
        assert_eq!(exact_cosine(&bv("1100"), &bv("0011")).unwrap().value, 0.0);
        // Zero vector: similarity 0 with the flag set.
        let z = exact_cosine(&bv("0000"), &b).unwrap();
        assert_eq!(z.value, 0.0);
        assert!(z.zero_vector);
    }

    #[test]
    fn hamming_basics() {
        let a = bv("1100");
        assert_eq!(hamming(&a, &a).unwrap(), 0);
        assert_eq!(hamming(&a, &a.complement()).unwrap(), 4);
        assert_eq!(hamming(&a, &bv("1010")).unwrap(), 2);
        assert!(hamming(&a, &bv("110")).is_err());
    }

    fn tiny_train() -> Dataset {
        Dataset {
            features: vec![1.0, 0.0, 0.0, 1.2, 0.1, -0.2, -1.0, 0.5, 0.8, -1.1, 0.6, 0.9],
            labels: vec![0, 0, 1, 1],
            n_features: 3,
            n_classes: 2,
        }
    }

    #[test]
    fn encoding_is_deterministic_and_prefix_stable() {
        let train = tiny_train();
        let scaler = FeatureScaler::fit(&train);
        let enc = Encoder {
            projection_seed: 9,
            n_features: 3,
            dim: 64,
            quantization: 0,
            kind: EncoderKind::SignProjection,
        };
        let c1 = enc.compile(scaler.clone()).unwrap();
        let c2 = enc.compile(scaler.clone()).unwrap();
        let x = [0.3, -0.4, 1.0];
        assert_eq!(c1.encode(&x).unwrap(), c2.encode(&x).unwrap());

        let small = Encoder { dim: 16, ..enc.clone() }.compile(scaler).unwrap();
        let full = c1.encode(&x).unwrap();
        let short = small.encode(&x).unwrap();
        for d in 0..16 {
            assert_eq!(full.get(d), short.get(d));
        }
    }

    #[test]
    fn negated_features_complement_the_encoding() {
        let train = tiny_train();
        let scaler = FeatureScaler {
            mean: vec![0.0; 3],
            std: vec![1.0; 3],
        };
        let _ = train;
        let enc = Encoder {
            projection_seed: 4,
            n_features: 3,
            dim: 256,
            quantization: 0,
            kind: EncoderKind::SignProjection,
        };
        let c = enc.compile(scaler).unwrap();
        let x = [0.37, -1.2, 0.55];
        let neg: Vec<f64> = x.iter().map(|v| -v).collect();
        let e = c.encode(&x).unwrap();
        let en = c.encode(&neg).unwrap();
        // Exact-zero projections would break the symmetry; none occur here.
        assert_eq!(en, e.complement());
    }

    #[test]
    fn majority_training_oracle() {
        // Three crafted 4-bit encodings with known per-bit majorities.
        let encs = vec![bv("1100"), bv("1010"), bv("1001")];
        let classes = train_from_encodings(&encs, &[0, 0, 0], 1, 4).unwrap();
        // Bit 0: 3/3 ones → 1. Bits 1..3: 1/3 ones → 0.
        assert_eq!(classes[0], bv("1000"));

        // Two samples: ties (bits where they disagree) go to 1.
        let encs = vec![bv("1100"), bv("1010")];
        let classes = train_from_encodings(&encs, &[0, 0], 1, 4).unwrap();
        assert_eq!(classes[0], bv("1110"));

        // One sample per class: the class vector is that encoding.
        let encs = vec![bv("0110"), bv("1001")];
        let classes = train_from_encodings(&encs, &[0, 1], 2, 4).unwrap();
        assert_eq!(classes[0], bv("0110"));
        assert_eq!(classes[1], bv("1001"));

        // Majority is idempotent over repeated samples.
        let encs = vec![bv("0110"); 3];
        let classes = train_from_encodings(&encs, &[0, 0, 0], 1, 4).unwrap();
        assert_eq!(classes[0], bv("0110"));
    }

    #[test]
    fn empty_class_is_reported() {
        let encs = vec![bv("0110")];
        match train_from_encodings(&encs, &[0], 2, 4) {
            Err(Error::EmptyClass(c)) => assert_eq!(c, 1),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn class_vector_query_hits_its_class_on_all_backends() {
        let split = well_separated(4, 30, 32, 3);
        let enc = Encoder {
            projection_seed: 1,
            dim: 256,
            ..Encoder::default()
        };
        let model = train_single_pass(&split.train, &enc).unwrap();
        let am = SimulatedAm::program_model(&model, &AmOptions::default()).unwrap();
        for (k, class_vec) in model.classes.iter().enumerate() {
            assert_eq!(
                classify_encoding(class_vec, &model, Backend::OracleCosine, None).unwrap(),
                k
            );
            assert_eq!(
                classify_encoding(class_vec, &model, Backend::OracleHamming, None).unwrap(),
                k
            );
            assert_eq!(
                classify_encoding(class_vec, &model, Backend::SimulatedAm, Some(&am)).unwrap(),
                k
            );
        }
    }

    #[test]
    fn separable_clusters_classify_perfectly() {
        let split = well_separated(4, 40, 32, 7);
        let enc = Encoder {
            projection_seed: 2,
            dim: 512,
            ..Encoder::default()
        };
        let rows = evaluate(
            &split,
            &enc,
            &[512],
            &[Backend::OracleCosine, Backend::OracleHamming, Backend::SimulatedAm],
            &AmOptions::default(),
        )
        .unwrap();
        for row in rows {
            assert!(row.accuracy > 0.99, "{}: {}", row.metric, row.accuracy);
        }
    }

    #[test]
    fn cosine_argmax_equals_hamming_argmin_for_equal_norms() {
        // Equal-norm class vectors make the two metrics coincide.
        let classes = vec![bv("11001010"), bv("00111100"), bv("10100101")];
        for c in &classes {
            assert_eq!(c.popcount(), 4);
        }
        let model = HdcModel {
            version: 1,
            encoder: Encoder {
                n_features: 1,
                dim: 8,
                ..Encoder::default()
            },
            scaler: FeatureScaler {
                mean: vec![0.0],
                std: vec![1.0],
            },
            classes,
            train_counts: vec![1, 1, 1],
        };
        for q in 0..=255u8 {
            let query = BinaryVector::from_bits((0..8).map(|b| (q >> b) & 1 == 1));
            if query.popcount() == 0 {
                continue;
            }
            let c = classify_encoding(&query, &model, Backend::OracleCosine, None).unwrap();
            let h = classify_encoding(&query, &model, Backend::OracleHamming, None).unwrap();
            // Ties may resolve differently; require equality when scores
            // are strictly ordered.
            let cos: Vec<f64> = model
                .classes
                .iter()
                .map(|cl| exact_cosine(&query, cl).unwrap().value)
                .collect();
            let mut sorted = cos.clone();
            sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
            if sorted[0] > sorted[1] + 1e-12 {
                assert_eq!(c, h, "query {q:08b}");
            }
        }
    }

    #[test]
    fn encoding_distance_grows_with_feature_distance() {
        let scaler = FeatureScaler {
            mean: vec![0.0; 16],
            std: vec![1.0; 16],
        };
        let enc = Encoder {
            projection_seed: 11,
            n_features: 16,
            dim: 1024,
            quantization: 0,
            kind: EncoderKind::SignProjection,
        };
        let c = enc.compile(scaler).unwrap();
        let mut rng = crate::rng::stream_rng(30, 0);
        let mut mean_distance = Vec::new();
        for eps in [0.05f64, 0.2, 0.8, 2.0] {
            let mut total = 0u64;
            let trials = 40;
            for _ in 0..trials {
                let x: Vec<f64> =
                    (0..16).map(|_| rand::Rng::gen_range(&mut rng, -1.0..1.0)).collect();
                let y: Vec<f64> = x
                    .iter()
                    .map(|v| v + eps * rand::Rng::gen_range(&mut rng, -1.0..1.0))
                    .collect();
                total += c.encode(&x).unwrap().hamming(&c.encode(&y).unwrap()) as u64;
            }
            mean_distance.push(total as f64 / trials as f64);
        }
        for w in mean_distance.windows(2) {
            assert!(w[1] > w[0], "distances {mean_distance:?}");
        }
    }

    #[test]
    fn model_json_round_trip() {
        let split = well_separated(3, 10, 16, 1);
        let enc = Encoder {
            projection_seed: 5,
            dim: 64,
            ..Encoder::default()
        };
        let model = train_single_pass(&split.train, &enc).unwrap();
        let text = model.to_json();
        let back = HdcModel::from_json(&text).unwrap();
        assert_eq!(back.classes, model.classes);
        assert_eq!(back.encoder.dim, 64);
    }

    #[test]
    fn injection_probability_shape() {
        let inj = ErrorInjection {
            rate: 0.1,
            ..ErrorInjection::default()
        };
        assert_eq!(inj.flip_probability(0.0), 0.1);
        assert_eq!(inj.flip_probability(0.01), 0.1);
        assert!(inj.flip_probability(0.05) < 0.1);
        assert!(inj.flip_probability(0.5) < 1e-4);
    }
}
