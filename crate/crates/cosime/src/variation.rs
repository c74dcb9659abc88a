//! Monte Carlo harness: end-to-end searches (arrays → translinear → WTA)
//! under sampled device variation.
//!
//! The worst-case scenario is the hardest discrimination the search engine
//! faces: two stored words whose squared similarities to the query are
//! exactly 1/4 and 1/5 while the words differ in a single bit of the norm
//! array. The integer constraints force the stored norms to be exactly 4
//! and 5 — `cos² = d²/(q·n)` with a one-bit norm difference requires
//! `(n+1)/n = 5/4` and `q = d²` — so instances differ only in the dot
//! count d. The canonical instance uses d = 2; every instance is verified
//! by the exact rational oracle before use.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::array::{program, scale_for_iy_target, ArrayGeometry, BinaryVector};
use crate::device::{CellParams, VariationSpec};
use crate::error::{Error, Result};
use crate::rng::{derive_seed, SimRng};
use crate::translinear::{row_similarities, TranslinearConfig};
use crate::wta::{solve_static, WtaConfig};
use rand_chacha::rand_core::SeedableRng;

/// Exact squared cosine as a rational: (dot², ‖a‖²·‖b‖²) in u128.
pub fn cos_sq_rational(a: &BinaryVector, b: &BinaryVector) -> (u128, u128) {
    let dot = a.dot(b) as u128;
    (dot * dot, a.popcount() as u128 * b.popcount() as u128)
}

/// True iff cos²(a, b) equals `num/den` exactly.
pub fn cos_sq_equals(a: &BinaryVector, b: &BinaryVector, num: u64, den: u64) -> bool {
    let (p, q) = cos_sq_rational(a, b);
    p * den as u128 == q * num as u128
}

/// A constructed search scenario: a query, stored words, and the exact
/// squared similarity of each word to the query.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioInstance {
    pub query: BinaryVector,
    pub stored: Vec<BinaryVector>,
    /// Exact cos² of each stored word as (numerator, denominator).
    pub cos_sq: Vec<(u64, u64)>,
    /// Row with the largest similarity (the correct search result).
    pub true_winner: usize,
}

impl ScenarioInstance {
    fn verify(&self) -> Result<()> {
        for (w, (num, den)) in self.stored.iter().zip(&self.cos_sq) {
            if !cos_sq_equals(&self.query, w, *num, *den) {
                return Err(Error::Domain(format!(
                    "constructed word does not realize cos² = {num}/{den}"
                )));
            }
        }
        Ok(())
    }
}

/// Build the worst-case pair at the given word length: squared
/// similarities exactly 1/4 and 1/5, one-bit norm difference.
///
/// The canonical instance (D ≥ 7) uses a two-cell dot product: query with
/// ones at 4 positions, word A sharing 2 of them plus 2 ones outside, and
/// word B = A plus one extra bit outside the query. For D of 5 or 6 the
/// single-cell instance (q = 1, norms 4 and 5) is the only one that fits.
pub fn worst_case_scenario(dim: usize) -> Result<ScenarioInstance> {
    let (query_bits, a_bits, b_bits): (Vec<usize>, Vec<usize>, Vec<usize>) = if dim >= 7 {
        (vec![0, 1, 2, 3], vec![0, 1, 4, 5], vec![0, 1, 4, 5, 6])
    } else if dim >= 5 {
        (vec![0], vec![0, 1, 2, 3], vec![0, 1, 2, 3, 4])
    } else {
        return Err(Error::Domain(format!(
            "worst-case pair needs at least 5 bits, got {dim}"
        )));
    };
    let instance = ScenarioInstance {
        query: BinaryVector::from_positions(dim, &query_bits),
        stored: vec![
            BinaryVector::from_positions(dim, &a_bits),
            BinaryVector::from_positions(dim, &b_bits),
        ],
        cos_sq: vec![(1, 4), (1, 5)],
        true_winner: 0,
    };
    instance.verify()?;
    debug_assert_eq!(instance.stored[0].hamming(&instance.stored[1]), 1);
    Ok(instance)
}

/// Best rational approximation of `x` by continued fractions, with
/// denominator at most `max_den` and error below `tol`.
fn rationalize(x: f64, max_den: u64, tol: f64) -> Option<(u64, u64)> {
    let mut h = (1u64, 0u64);
    let mut k = (0u64, 1u64);
    let mut v = x;
    for _ in 0..64 {
        let a = v.floor();
        if a < 0.0 || a > max_den as f64 {
            break;
        }
        let a_int = a as u64;
        let h_next = a_int.checked_mul(h.0)?.checked_add(h.1)?;
        let k_next = a_int.checked_mul(k.0)?.checked_add(k.1)?;
        if k_next > max_den {
            break;
        }
        h = (h_next, h.0);
        k = (k_next, k.0);
        let approx = h.0 as f64 / k.0 as f64;
        if (approx - x).abs() < tol {
            return Some((h.0, k.0));
        }
        let frac = v - a;
        if frac.abs() < 1e-15 {
            break;
        }
        v = 1.0 / frac;
    }
    if k.0 > 0 && (h.0 as f64 / k.0 as f64 - x).abs() < tol {
        Some((h.0, k.0))
    } else {
        None
    }
}

/// Construct a query and two stored words realizing the exact squared
/// similarities `target_a` and `target_b` (rationals), sharing one query.
/// Candidate solutions of `d²·r = p·q·n` are scored by how close the
/// stored norms come to `norm_target`, which sets the cell-count scale of
/// the resulting array currents.
pub fn construct_pair(
    dim: usize,
    target_a: (u64, u64),
    target_b: (u64, u64),
    norm_target: u64,
) -> Result<ScenarioInstance> {
    let q_cap = dim.min(512) as u64;
    let solve_row = |q: u64, (p, r): (u64, u64)| -> Option<(u64, u64)> {
        // Smallest-score (d, n) for this query popcount.
        let mut best: Option<(u64, u64, u64)> = None;
        for d in 1..=q {
            let num = d as u128 * d as u128 * r as u128;
            let den = p as u128 * q as u128;
            if num % den != 0 {
                continue;
            }
            let n = (num / den) as u64;
            if n < d || n == 0 || n as usize > dim {
                continue;
            }
            let score = n.abs_diff(norm_target);
            if best.map_or(true, |(s, _, _)| score < s) {
                best = Some((score, d, n));
            }
        }
        best.map(|(_, d, n)| (d, n))
    };

    let mut best: Option<(u64, u64, u64, u64, u64, u64)> = None;
    for q in 1..=q_cap {
        let (Some((da, na)), Some((db, nb))) = (solve_row(q, target_a), solve_row(q, target_b))
        else {
            continue;
        };
        if q + (na - da) + (nb - db) > dim as u64 {
            continue;
        }
        let score = na.abs_diff(norm_target) + nb.abs_diff(norm_target);
        if best.map_or(true, |(s, ..)| score < s) {
            best = Some((score, q, da, na, db, nb));
        }
        if score == 0 {
            break;
        }
    }
    let Some((_, q, da, na, db, nb)) = best else {
        return Err(Error::Domain(format!(
            "no {}-bit construction realizes cos² = {}/{} and {}/{}",
            dim, target_a.0, target_a.1, target_b.0, target_b.1
        )));
    };

    let q = q as usize;
    let (da, na, db, nb) = (da as usize, na as usize, db as usize, nb as usize);
    let query = BinaryVector::from_positions(dim, &(0..q).collect::<Vec<_>>());
    let mut a_pos: Vec<usize> = (0..da).collect();
    a_pos.extend(q..q + (na - da));
    let mut b_pos: Vec<usize> = (0..db).collect();
    b_pos.extend(q + (na - da)..q + (na - da) + (nb - db));
    let (num_a, den_a) = target_a;
    let (num_b, den_b) = target_b;
    let true_winner = if num_a as u128 * den_b as u128 >= num_b as u128 * den_a as u128 {
        0
    } else {
        1
    };
    let instance = ScenarioInstance {
        query,
        stored: vec![
            BinaryVector::from_positions(dim, &a_pos),
            BinaryVector::from_positions(dim, &b_pos),
        ],
        cos_sq: vec![target_a, target_b],
        true_winner,
    };
    instance.verify()?;
    Ok(instance)
}

/// What a Monte Carlo run searches over.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scenario {
    /// The cos² = 1/4 vs 1/5 one-bit pair.
    WorstCasePair,
    /// One word fixed at cos = 0.5, competitor swept over `bins`.
    SimilaritySweep { bins: Vec<f64> },
    /// Caller-provided stored words and query.
    Custom {
        stored: Vec<BinaryVector>,
        query: BinaryVector,
        true_winner: usize,
    },
}

/// A Monte Carlo experiment description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct McExperiment {
    pub trials: usize,
    pub spec: VariationSpec,
    pub scenario: Scenario,
    /// Word length of the arrays.
    pub dim: usize,
    /// Row current the resistor tuning targets for the largest stored
    /// norm (A).
    pub iy_target: f64,
    pub master_seed: u64,
    /// Keep per-trial records in the result.
    pub log_trials: bool,
}

impl Default for McExperiment {
    fn default() -> Self {
        Self {
            trials: 1000,
            spec: VariationSpec::default(),
            scenario: Scenario::WorstCasePair,
            dim: 1024,
            iy_target: 600e-9,
            master_seed: 0,
            log_trials: false,
        }
    }
}

/// Default competitor cos bins of the similarity sweep.
pub fn default_sweep_bins() -> Vec<f64> {
    vec![0.30, 0.35, 0.40, 1.0 / 5.0f64.sqrt(), 0.45, 0.48]
}

/// Analog stages the Monte Carlo trials run through.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McPipeline {
    pub cell: CellParams,
    pub translinear: TranslinearConfig,
    pub wta: WtaConfig,
}

/// One trial's outcome.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub winner: usize,
    pub correct: bool,
    pub converged: bool,
    pub resolvable: bool,
    /// Relative margin of the noisy translinear outputs.
    pub margin: f64,
    pub all_rows_in_region: bool,
}

/// Error rate of one sweep bin.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BinErrorRate {
    pub competitor_cos: f64,
    pub error_rate: f64,
    pub trials: usize,
}

/// Monte Carlo result.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct McResult {
    /// Fraction of trials with the correct winner (sweep: averaged over
    /// bins).
    pub accuracy: f64,
    pub trials: usize,
    pub error_rate_by_bin: Vec<BinErrorRate>,
    pub trial_log: Option<Vec<TrialRecord>>,
}

fn run_trial(
    instance: &ScenarioInstance,
    exp: &McExperiment,
    pipe: &McPipeline,
    seed: u64,
    trial: usize,
) -> Result<TrialRecord> {
    let mut rng = SimRng::seed_from_u64(seed);
    let rows = instance.stored.len();
    let max_norm = instance
        .stored
        .iter()
        .map(|w| w.popcount())
        .max()
        .unwrap_or(1);
    let scale = scale_for_iy_target(&pipe.cell, max_norm, exp.iy_target);
    let geometry = ArrayGeometry::new(rows, exp.dim).with_scale(scale);

    // Fixed draw order: supply, cell grids, per-row analog-chain mismatch.
    let supply = exp.spec.sample_supply_factor(&mut rng);
    let arr = program(
        instance.stored.clone(),
        geometry,
        &pipe.cell,
        &exp.spec,
        &mut rng,
    )?;
    let rc = arr.row_currents_scaled(&instance.query, supply)?;
    let sims = row_similarities(&rc.ix, &rc.iy, &pipe.translinear)?;
    let iz: Vec<f64> = sims
        .iter()
        .map(|s| s.iz * exp.spec.sample_row_mismatch(&mut rng))
        .collect();
    let all_rows_in_region = sims.iter().all(|s| s.in_region);

    let wta_cfg = WtaConfig {
        m: rows,
        ..pipe.wta.clone()
    };
    let sol = solve_static(&iz, &wta_cfg)?;
    let dominant = sol
        .i_out
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != sol.winner)
        .all(|(_, out)| sol.i_out[sol.winner] >= wta_cfg.dominance_factor * *out);
    Ok(TrialRecord {
        trial,
        winner: sol.winner,
        correct: sol.converged && sol.winner == instance.true_winner,
        converged: sol.converged,
        resolvable: sol.converged && dominant,
        margin: sol.margin,
        all_rows_in_region,
    })
}

/// Run a Monte Carlo experiment. Trials are independent, seeded from the
/// master seed, and merged in trial order, so results are reproducible
/// regardless of thread scheduling.
pub fn run_mc(exp: &McExperiment, pipe: &McPipeline) -> Result<McResult> {
    if exp.trials == 0 {
        return Err(Error::Config("trials must be >= 1".into()));
    }
    exp.spec.validate()?;
    match &exp.scenario {
        Scenario::SimilaritySweep { bins } => run_sweep(exp, pipe, bins),
        Scenario::WorstCasePair => {
            let instance = worst_case_scenario(exp.dim)?;
            run_fixed_scenario(exp, pipe, &instance)
        }
        Scenario::Custom {
            stored,
            query,
            true_winner,
        } => {
            let instance = ScenarioInstance {
                query: query.clone(),
                stored: stored.clone(),
                cos_sq: Vec::new(),
                true_winner: *true_winner,
            };
            run_fixed_scenario(exp, pipe, &instance)
        }
    }
}

fn run_fixed_scenario(
    exp: &McExperiment,
    pipe: &McPipeline,
    instance: &ScenarioInstance,
) -> Result<McResult> {
    let records: Result<Vec<TrialRecord>> = (0..exp.trials)
        .into_par_iter()
        .map(|t| run_trial(instance, exp, pipe, derive_seed(exp.master_seed, t as u64), t))
        .collect();
    let records = records?;
    let correct = records.iter().filter(|r| r.correct).count();
    Ok(McResult {
        accuracy: correct as f64 / exp.trials as f64,
        trials: exp.trials,
        error_rate_by_bin: Vec::new(),
        trial_log: exp.log_trials.then_some(records),
    })
}

fn run_sweep(exp: &McExperiment, pipe: &McPipeline, bins: &[f64]) -> Result<McResult> {
    if bins.is_empty() {
        return Err(Error::Config("similarity sweep needs at least one bin".into()));
    }
    let reference = (1u64, 4u64); // cos = 0.5
    let mut by_bin = Vec::with_capacity(bins.len());
    let mut total_correct = 0usize;
    for (b, &cos) in bins.iter().enumerate() {
        if !(0.0 < cos && cos < 0.5) {
            return Err(Error::Config(format!(
                "sweep bin cos = {cos} must lie in (0, 0.5)"
            )));
        }
        let target = rationalize(cos * cos, 1_000_000, 1e-9).ok_or_else(|| {
            Error::Config(format!("cannot rationalize sweep bin cos = {cos}"))
        })?;
        let instance = construct_pair(exp.dim, reference, target, 100)?;
        let bin_seed = derive_seed(exp.master_seed, 1_000_000 + b as u64);
        let records: Result<Vec<TrialRecord>> = (0..exp.trials)
            .into_par_iter()
            .map(|t| run_trial(&instance, exp, pipe, derive_seed(bin_seed, t as u64), t))
            .collect();
        let records = records?;
        let correct = records.iter().filter(|r| r.correct).count();
        total_correct += correct;
        by_bin.push(BinErrorRate {
            competitor_cos: cos,
            error_rate: 1.0 - correct as f64 / exp.trials as f64,
            trials: exp.trials,
        });
    }
    Ok(McResult {
        accuracy: total_correct as f64 / (exp.trials * bins.len()) as f64,
        trials: exp.trials,
        error_rate_by_bin: by_bin,
        trial_log: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worst_case_is_exact_at_full_width() {
        let inst = worst_case_scenario(1024).unwrap();
        assert!(cos_sq_equals(&inst.query, &inst.stored[0], 1, 4));
        assert!(cos_sq_equals(&inst.query, &inst.stored[1], 1, 5));
        assert_eq!(inst.stored[0].hamming(&inst.stored[1]), 1);
        assert_eq!(inst.true_winner, 0);
        // Norms are forced to 4 and 5 by the one-bit constraint.
        assert_eq!(inst.stored[0].popcount(), 4);
        assert_eq!(inst.stored[1].popcount(), 5);
    }

    #[test]
    fn worst_case_minimum_widths() {
        assert!(worst_case_scenario(4).is_err());
        let inst = worst_case_scenario(5).unwrap();
        assert!(cos_sq_equals(&inst.query, &inst.stored[0], 1, 4));
        assert!(cos_sq_equals(&inst.query, &inst.stored[1], 1, 5));
        assert_eq!(inst.stored[0].hamming(&inst.stored[1]), 1);
    }

    #[test]
    fn constructed_sweep_pairs_are_exact() {
        for cos in default_sweep_bins() {
            let target = rationalize(cos * cos, 1_000_000, 1e-9).unwrap();
            let inst = construct_pair(1024, (1, 4), target, 100).unwrap();
            assert!(cos_sq_equals(&inst.query, &inst.stored[0], 1, 4));
            assert!(
                cos_sq_equals(&inst.query, &inst.stored[1], target.0, target.1),
                "bin {cos}: target {target:?}"
            );
            assert_eq!(inst.true_winner, 0);
        }
    }

    #[test]
    fn rationalize_recovers_simple_fractions() {
        assert_eq!(rationalize(0.25, 1000, 1e-9), Some((1, 4)));
        assert_eq!(rationalize(0.2304, 1_000_000, 1e-9), Some((144, 625)));
        let c = 1.0 / 5.0f64.sqrt();
        assert_eq!(rationalize(c * c, 1_000_000, 1e-9), Some((1, 5)));
    }

    #[test]
    fn zero_variation_accuracy_is_one() {
        let exp = McExperiment {
            trials: 200,
            spec: VariationSpec::zero(),
            dim: 64,
            ..McExperiment::default()
        };
        let res = run_mc(&exp, &McPipeline::default()).unwrap();
        assert_eq!(res.accuracy, 1.0);
    }

    #[test]
    fn identical_master_seed_reproduces_results() {
        let exp = McExperiment {
            trials: 100,
            dim: 64,
            master_seed: 7,
            log_trials: true,
            ..McExperiment::default()
        };
        let a = run_mc(&exp, &McPipeline::default()).unwrap();
        let b = run_mc(&exp, &McPipeline::default()).unwrap();
        assert_eq!(a.accuracy, b.accuracy);
        let la = a.trial_log.unwrap();
        let lb = b.trial_log.unwrap();
        for (x, y) in la.iter().zip(&lb) {
            assert_eq!(x.winner, y.winner);
            assert_eq!(x.margin, y.margin);
        }
    }

    #[test]
    fn larger_gap_is_not_harder() {
        // Worst case (1/4 vs 1/5) against a wider-gap pair (1/4 vs 1/8)
        // at identical sigmas; binomial 95% bound at 400 trials ≈ 5%.
        let trials = 400;
        let worst = run_mc(
            &McExperiment {
                trials,
                dim: 64,
                master_seed: 3,
                ..McExperiment::default()
            },
            &McPipeline::default(),
        )
        .unwrap();
        let wide_inst = construct_pair(64, (1, 4), (1, 8), 8).unwrap();
        let wide = run_mc(
            &McExperiment {
                trials,
                dim: 64,
                master_seed: 3,
                scenario: Scenario::Custom {
                    stored: wide_inst.stored.clone(),
                    query: wide_inst.query.clone(),
                    true_winner: wide_inst.true_winner,
                },
                ..McExperiment::default()
            },
            &McPipeline::default(),
        )
        .unwrap();
        assert!(wide.accuracy >= worst.accuracy - 0.05);
    }
}
