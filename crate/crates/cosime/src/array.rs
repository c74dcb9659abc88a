//! The two FeFET memory arrays.
//!
//! One array gates its cells with the query bits and sums a per-word
//! dot-product current Ix; the second stores the same words, drives every
//! bitline high, and sums the squared-norm current Iy (the word's
//! popcount). Both are ideal current sums over independently sampled
//! cells. Row-wise scaling divides the per-cell current by the scale
//! factor so downstream stages keep their operating window.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::device::{sample_cell, CellParams, VariationSpec};
use crate::error::{Error, Result};
use crate::rng::SimRng;

/// A fixed-length vector of bits, packed into 64-bit blocks.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryVector {
    blocks: Vec<u64>,
    len: usize,
}

impl BinaryVector {
    pub fn zeros(len: usize) -> Self {
        assert!(len >= 1, "BinaryVector length must be >= 1");
        Self {
            blocks: vec![0; (len + 63) / 64],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self::zeros(len);
        for i in 0..len {
            v.set(i, true);
        }
        v
    }

    /// Build from an iterator of bits, length taken from the iterator.
    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut v = Self::zeros(bits.len().max(1));
        v.len = bits.len();
        for (i, b) in bits.iter().enumerate() {
            v.set(i, *b);
        }
        v
    }

    /// Vector of length `len` with ones exactly at `positions`.
    pub fn from_positions(len: usize, positions: &[usize]) -> Self {
        let mut v = Self::zeros(len);
        for &p in positions {
            assert!(p < len, "bit position {p} out of range for length {len}");
            v.set(p, true);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.blocks[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.blocks[i / 64] |= mask;
        } else {
            self.blocks[i / 64] &= !mask;
        }
    }

    /// Number of ones (the squared L2 norm of a binary vector).
    pub fn popcount(&self) -> u32 {
        self.blocks.iter().map(|b| b.count_ones()).sum()
    }

    /// Dot product: popcount of the bitwise AND.
    pub fn dot(&self, other: &BinaryVector) -> u32 {
        assert_eq!(self.len, other.len, "dot of unequal lengths");
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| (a & b).count_ones())
            .sum()
    }

    /// Hamming distance: popcount of the bitwise XOR.
    pub fn hamming(&self, other: &BinaryVector) -> u32 {
        assert_eq!(self.len, other.len, "hamming of unequal lengths");
        self.blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| (a ^ b).count_ones())
            .sum()
    }

    pub fn complement(&self) -> BinaryVector {
        let mut v = self.clone();
        for i in 0..v.len {
            let b = v.get(i);
            v.set(i, !b);
        }
        v
    }

    pub fn iter_bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

impl fmt::Display for BinaryVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter_bits() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl FromStr for BinaryVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::Shape("empty bit string".into()));
        }
        let mut v = BinaryVector::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                other => {
                    return Err(Error::Shape(format!(
                        "invalid character '{other}' at position {i} in bit string"
                    )))
                }
            }
        }
        Ok(v)
    }
}

impl Serialize for BinaryVector {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BinaryVector {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parse a word file: one word per line, characters '0'/'1', all lines the
/// same length. Blank lines are rejected; errors carry the line number.
pub fn parse_word_lines(text: &str) -> Result<Vec<BinaryVector>> {
    let mut words = Vec::new();
    let mut dim: Option<usize> = None;
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        let lineno = idx + 1;
        let word: BinaryVector = line.parse().map_err(|e: Error| Error::Parse {
            line: lineno,
            msg: e.to_string(),
        })?;
        match dim {
            None => dim = Some(word.len()),
            Some(d) if d != word.len() => {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("expected {d} bits, found {}", word.len()),
                })
            }
            _ => {}
        }
        words.push(word);
    }
    if words.is_empty() {
        return Err(Error::Shape("word file contains no words".into()));
    }
    Ok(words)
}

/// Array geometry: M stored words of D bits, plus the resistor-tuning
/// divisor N applied to every cell current.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ArrayGeometry {
    /// Number of stored words (a search needs at least two).
    pub rows: usize,
    /// Bits per word.
    pub dim: usize,
    /// Resistor-tuning divisor N; per-cell current = base / N.
    pub scale_factor: f64,
}

impl Default for ArrayGeometry {
    fn default() -> Self {
        Self {
            rows: 2,
            dim: 1024,
            scale_factor: 1.0,
        }
    }
}

impl ArrayGeometry {
    pub fn new(rows: usize, dim: usize) -> Self {
        Self {
            rows,
            dim,
            scale_factor: 1.0,
        }
    }

    pub fn with_scale(mut self, scale_factor: f64) -> Self {
        self.scale_factor = scale_factor;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows < 2 {
            return Err(Error::Config("array needs at least 2 rows".into()));
        }
        if self.dim < 1 {
            return Err(Error::Config("array dim must be >= 1".into()));
        }
        if !(self.scale_factor > 0.0) {
            return Err(Error::Config("scale_factor must be positive".into()));
        }
        Ok(())
    }
}

/// Scale factor that tunes the per-cell current so that the row with the
/// largest stored norm draws `iy_target`.
pub fn scale_for_iy_target(base: &CellParams, max_norm: u32, iy_target: f64) -> f64 {
    base.i_on * max_norm as f64 / iy_target
}

/// The programmed pair of arrays: identical stored content, independently
/// sampled cell grids for the dot-product (x) and norm (y) paths.
#[derive(Debug, Clone)]
pub struct ArrayInstance {
    pub geometry: ArrayGeometry,
    pub stored: Vec<BinaryVector>,
    /// Row-major M×D cell grid of the dot-product array.
    pub cells_x: Vec<CellParams>,
    /// Row-major M×D cell grid of the norm array.
    pub cells_y: Vec<CellParams>,
    /// Nominal per-cell ON current after scale tuning (A).
    pub i_cell_nominal: f64,
}

/// Per-row output currents of both arrays.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowCurrents {
    pub ix: Vec<f64>,
    pub iy: Vec<f64>,
}

/// Program both arrays with `stored`, sampling per-cell variation
/// independently for the two grids. Draw order is fixed (x grid row-major,
/// then y grid), so a given RNG state yields a unique instance.
pub fn program(
    stored: Vec<BinaryVector>,
    geometry: ArrayGeometry,
    nominal: &CellParams,
    spec: &VariationSpec,
    rng: &mut SimRng,
) -> Result<ArrayInstance> {
    geometry.validate()?;
    if stored.len() != geometry.rows {
        return Err(Error::Shape(format!(
            "expected {} stored words, got {}",
            geometry.rows,
            stored.len()
        )));
    }
    for (m, w) in stored.iter().enumerate() {
        if w.len() != geometry.dim {
            return Err(Error::Shape(format!(
                "stored word {m} has {} bits, expected {}",
                w.len(),
                geometry.dim
            )));
        }
    }
    let scaled = nominal.scaled(geometry.scale_factor);
    let n_cells = geometry.rows * geometry.dim;
    let sample_grid = |rng: &mut SimRng| -> Vec<CellParams> {
        (0..n_cells).map(|_| sample_cell(&scaled, spec, rng)).collect()
    };
    let cells_x = sample_grid(rng);
    let cells_y = sample_grid(rng);
    Ok(ArrayInstance {
        i_cell_nominal: scaled.i_on,
        geometry,
        stored,
        cells_x,
        cells_y,
    })
}

impl ArrayInstance {
    /// Per-row currents for a query word, optionally scaled by a common
    /// supply factor.
    ///
    /// Dot-product array: a cell conducts its ON current iff it stores 1
    /// and its query bit is 1 (the cell-level AND); every non-conducting
    /// cell contributes `i_off`. Norm array: all bitlines high, so cells
    /// storing 1 conduct and cells storing 0 leak.
    pub fn row_currents_scaled(&self, query: &BinaryVector, supply_factor: f64) -> Result<RowCurrents> {
        if query.len() != self.geometry.dim {
            return Err(Error::Shape(format!(
                "query has {} bits, array dim is {}",
                query.len(),
                self.geometry.dim
            )));
        }
        let d = self.geometry.dim;
        let mut ix = Vec::with_capacity(self.geometry.rows);
        let mut iy = Vec::with_capacity(self.geometry.rows);
        for (m, word) in self.stored.iter().enumerate() {
            let row = m * d;
            let mut sum_x = 0.0;
            let mut sum_y = 0.0;
            for b in 0..d {
                let stored_one = word.get(b);
                let cx = &self.cells_x[row + b];
                sum_x += if stored_one && query.get(b) {
                    cx.i_on
                } else {
                    cx.i_off
                };
                let cy = &self.cells_y[row + b];
                sum_y += if stored_one { cy.i_on } else { cy.i_off };
            }
            ix.push(sum_x * supply_factor);
            iy.push(sum_y * supply_factor);
        }
        Ok(RowCurrents { ix, iy })
    }

    /// Per-row currents at nominal supply.
    pub fn row_currents(&self, query: &BinaryVector) -> Result<RowCurrents> {
        self.row_currents_scaled(query, 1.0)
    }
}

/// Zero-variation Eq.-style scaling check: programming the same content at
/// scale N = k (per-cell current divided by k) and restoring the factor
/// with a mirror gain of k must reproduce the per-row Iz of the unscaled
/// array. Returns true iff every original row matches within `rel_tol`.
pub fn scaled_equivalence_check(
    stored: &[BinaryVector],
    dim: usize,
    nominal: &CellParams,
    k: f64,
    rel_tol: f64,
) -> Result<bool> {
    use crate::translinear::{row_similarities, TranslinearConfig};

    let spec = VariationSpec::zero();
    let rows = stored.len();
    let base_geo = ArrayGeometry::new(rows, dim);
    let mut rng = crate::rng::stream_rng(0, 0);
    let base = program(stored.to_vec(), base_geo, nominal, &spec, &mut rng)?;

    // Row count multiplied by k (content replicated) with cell current / k.
    let k_rows = (rows as f64 * k).ceil() as usize;
    let mut replicated: Vec<BinaryVector> = Vec::with_capacity(k_rows);
    while replicated.len() < k_rows {
        for w in stored {
            if replicated.len() == k_rows {
                break;
            }
            replicated.push(w.clone());
        }
    }
    let scaled_geo = ArrayGeometry::new(k_rows, dim).with_scale(k);
    let mut rng = crate::rng::stream_rng(0, 1);
    let scaled = program(replicated, scaled_geo, nominal, &spec, &mut rng)?;

    let query = BinaryVector::ones(dim);
    let base_rc = base.row_currents(&query)?;
    let scaled_rc = scaled.row_currents(&query)?;

    let cfg1 = TranslinearConfig::default();
    let cfg_k = TranslinearConfig {
        mirror_ratio: k,
        ..TranslinearConfig::default()
    };
    let iz1 = row_similarities(&base_rc.ix, &base_rc.iy, &cfg1)?;
    let izk = row_similarities(&scaled_rc.ix[..rows], &scaled_rc.iy[..rows], &cfg_k)?;
    Ok(iz1
        .iter()
        .zip(&izk)
        .all(|(a, b)| (a.iz - b.iz).abs() <= rel_tol * a.iz.abs().max(f64::MIN_POSITIVE)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use proptest::prelude::*;

    fn word(s: &str) -> BinaryVector {
        s.parse().unwrap()
    }

    #[test]
    fn popcount_dot_hamming() {
        let a = word("1011");
        let b = word("1001");
        assert_eq!(a.popcount(), 3);
        assert_eq!(a.dot(&b), 2);
        assert_eq!(a.hamming(&b), 1);
        assert_eq!(a.dot(&a), a.popcount());
    }

    #[test]
    fn parse_rejects_bad_lines() {
        let err = parse_word_lines("1010\n10x0\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
        let err = parse_word_lines("1010\n101\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    fn programmed(stored: &[&str], scale: f64) -> ArrayInstance {
        let words: Vec<BinaryVector> = stored.iter().map(|s| word(s)).collect();
        let dim = words[0].len();
        let geo = ArrayGeometry::new(words.len(), dim).with_scale(scale);
        let mut rng = stream_rng(1, 0);
        program(words, geo, &CellParams::default(), &VariationSpec::zero(), &mut rng).unwrap()
    }

    #[test]
    fn zero_variation_row_currents_are_popcounts() {
        let arr = programmed(&["1011", "1001"], 1.0);
        let c = arr.i_cell_nominal;
        let rc = arr.row_currents(&word("1001")).unwrap();
        // AND(1001, 1011) has 2 ones; AND(1001, 1001) has 2 ones.
        assert!((rc.ix[0] - 2.0 * c).abs() < 1e-18);
        assert!((rc.ix[1] - 2.0 * c).abs() < 1e-18);
        assert!((rc.iy[0] - 3.0 * c).abs() < 1e-18);
        assert!((rc.iy[1] - 2.0 * c).abs() < 1e-18);
        // Query equal to a stored word: ix = iy on that row.
        assert_eq!(rc.ix[1], rc.iy[1]);
    }

    #[test]
    fn scale_factor_divides_cell_current() {
        let arr = programmed(&["1011", "1001"], 8.0);
        assert!((arr.i_cell_nominal - CellParams::default().i_on / 8.0).abs() < 1e-24);
    }

    #[test]
    fn programming_is_deterministic() {
        let words = vec![word("1011"), word("1001")];
        let geo = ArrayGeometry::new(2, 4);
        let spec = VariationSpec::default().with_seed(5);
        let mut r1 = stream_rng(5, 0);
        let mut r2 = stream_rng(5, 0);
        let a = program(words.clone(), geo.clone(), &CellParams::default(), &spec, &mut r1).unwrap();
        let b = program(words, geo, &CellParams::default(), &spec, &mut r2).unwrap();
        for (ca, cb) in a.cells_x.iter().zip(&b.cells_x) {
            assert_eq!(ca.i_on, cb.i_on);
        }
        for (ca, cb) in a.cells_y.iter().zip(&b.cells_y) {
            assert_eq!(ca.i_on, cb.i_on);
        }
    }

    #[test]
    fn shape_errors() {
        let words = vec![word("1011")];
        let geo = ArrayGeometry::new(2, 4);
        let mut rng = stream_rng(0, 0);
        assert!(matches!(
            program(words, geo, &CellParams::default(), &VariationSpec::zero(), &mut rng),
            Err(Error::Shape(_))
        ));
        let arr = programmed(&["1011", "1001"], 1.0);
        assert!(matches!(arr.row_currents(&word("10111")), Err(Error::Shape(_))));
    }

    #[test]
    fn leakage_mode_adds_off_current() {
        let words = vec![word("1010"), word("0101")];
        let geo = ArrayGeometry::new(2, 4);
        let cell = CellParams {
            i_off: 1e-12,
            ..CellParams::default()
        };
        let mut rng = stream_rng(0, 0);
        let arr = program(words, geo, &cell, &VariationSpec::zero(), &mut rng).unwrap();
        let rc = arr.row_currents(&word("0000")).unwrap();
        // No cell conducts; every cell leaks.
        assert!((rc.ix[0] - 4.0 * 1e-12).abs() < 1e-24);
        // Norm array: two ON cells, two leaking.
        assert!((rc.iy[0] - (2.0 * arr.i_cell_nominal + 2.0 * 1e-12)).abs() < 1e-22);
    }

    #[test]
    fn scaled_equivalence_exact_for_power_of_two() {
        let stored = vec![word("1011"), word("1001")];
        for k in [1.0, 4.0] {
            assert!(scaled_equivalence_check(&stored, 4, &CellParams::default(), k, 1e-9).unwrap());
        }
    }

    proptest! {
        #[test]
        fn bounds_and_permutation_equivariance(
            bits_a in proptest::collection::vec(any::<bool>(), 16),
            bits_b in proptest::collection::vec(any::<bool>(), 16),
            q in proptest::collection::vec(any::<bool>(), 16),
            perm_seed in any::<u64>(),
        ) {
            let stored = vec![BinaryVector::from_bits(bits_a.clone()), BinaryVector::from_bits(bits_b.clone())];
            let query = BinaryVector::from_bits(q.clone());
            let geo = ArrayGeometry::new(2, 16);
            let mut rng = stream_rng(0, 0);
            let arr = program(stored, geo, &CellParams::default(), &VariationSpec::zero(), &mut rng).unwrap();
            let rc = arr.row_currents(&query).unwrap();
            let dmax = 16.0 * arr.i_cell_nominal;
            for m in 0..2 {
                prop_assert!(rc.ix[m] >= 0.0);
                prop_assert!(rc.ix[m] <= rc.iy[m] + 1e-24);
                prop_assert!(rc.iy[m] <= dmax + 1e-24);
            }

            // Permute all bit positions identically: ix, iy unchanged.
            let mut perm: Vec<usize> = (0..16).collect();
            let mut state = perm_seed;
            for i in (1..16usize).rev() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let j = (state >> 33) as usize % (i + 1);
                perm.swap(i, j);
            }
            let apply = |bits: &[bool]| BinaryVector::from_bits(perm.iter().map(|&p| bits[p]));
            let stored_p = vec![apply(&bits_a), apply(&bits_b)];
            let mut rng = stream_rng(0, 0);
            let arr_p = program(stored_p, ArrayGeometry::new(2, 16), &CellParams::default(), &VariationSpec::zero(), &mut rng).unwrap();
            let rc_p = arr_p.row_currents(&apply(&q)).unwrap();
            for m in 0..2 {
                prop_assert!((rc.ix[m] - rc_p.ix[m]).abs() < 1e-20);
                prop_assert!((rc.iy[m] - rc_p.iy[m]).abs() < 1e-20);
            }
        }

        #[test]
        fn disjoint_query_linearity(
            q1 in proptest::collection::vec(any::<bool>(), 12),
            stored_bits in proptest::collection::vec(any::<bool>(), 12),
        ) {
            // Split q1 into two disjoint-support halves.
            let a: Vec<bool> = q1.iter().enumerate().map(|(i, b)| *b && i % 2 == 0).collect();
            let b: Vec<bool> = q1.iter().enumerate().map(|(i, b)| *b && i % 2 == 1).collect();
            let both: Vec<bool> = a.iter().zip(&b).map(|(x, y)| *x || *y).collect();
            let stored = vec![BinaryVector::from_bits(stored_bits.clone()), BinaryVector::from_bits(stored_bits)];
            let mut rng = stream_rng(0, 0);
            let arr = program(stored, ArrayGeometry::new(2, 12), &CellParams::default(), &VariationSpec::zero(), &mut rng).unwrap();
            let ra = arr.row_currents(&BinaryVector::from_bits(a)).unwrap();
            let rb = arr.row_currents(&BinaryVector::from_bits(b)).unwrap();
            let rab = arr.row_currents(&BinaryVector::from_bits(both)).unwrap();
            for m in 0..2 {
                prop_assert!((rab.ix[m] - (ra.ix[m] + rb.ix[m])).abs() < 1e-20);
            }
        }
    }
}
