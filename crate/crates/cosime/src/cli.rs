//! Command implementations behind the `cosime` binary.
//!
//! Every command is a pure function of (config, input files, master seed):
//! reports carry no timestamps and use ordered maps, so re-running a
//! command yields byte-identical output files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::array::{parse_word_lines, program, scale_for_iy_target, ArrayGeometry, BinaryVector};
use crate::config::{DatasetRef, RunConfig};
use crate::cost::{compare_to_baselines, estimate, Baselines};
use crate::error::{Error, Result};
use crate::hdc::dataset::{face_like, isolet_like, ucihar_like, Split};
use crate::hdc::{
    evaluate, exact_cos_sq, train_single_pass, AccuracyRow, AmOptions, Backend, Encoder,
    SimulatedAm,
};
use crate::rng::stream_rng;
use crate::translinear::row_similarities;
use crate::variation::{run_mc, McExperiment, Scenario};
use crate::wta::{solve_static, WtaConfig};

/// What a command produced: human-readable summary lines plus the files
/// it wrote.
#[derive(Debug, Default)]
pub struct CommandOutput {
    pub summary: Vec<String>,
    pub files: Vec<PathBuf>,
}

impl CommandOutput {
    fn note(&mut self, line: impl Into<String>) {
        self.summary.push(line.into());
    }

    fn write(&mut self, dir: &Path, name: &str, content: &str) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(name);
        std::fs::write(&path, content)?;
        self.files.push(path);
        Ok(())
    }

    fn write_resolved_config(&mut self, dir: &Path, cfg: &RunConfig) -> Result<()> {
        self.write(dir, "resolved_config.toml", &cfg.to_toml())
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}

/// Per-row detail of a single search.
#[derive(Debug, Serialize, Deserialize)]
struct SearchRow {
    row: usize,
    stored_popcount: u32,
    ix: f64,
    iy: f64,
    iz: f64,
    in_region: bool,
    oracle_cos_sq: f64,
}

/// Report of `cosime search`.
#[derive(Debug, Serialize, Deserialize)]
struct SearchReport {
    rows: Vec<SearchRow>,
    winner: usize,
    oracle_argmax: usize,
    oracle_agreement: bool,
    resolvable: bool,
    wta_converged: bool,
    wta_margin: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    wta_rails: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    wta_outputs: Option<Vec<f64>>,
}

fn read_words(path: &Path) -> Result<Vec<BinaryVector>> {
    let text = std::fs::read_to_string(path)?;
    parse_word_lines(&text)
}

/// Run one full search: stored file (one word per line) against a
/// single-line query file.
pub fn cmd_search(
    cfg: &RunConfig,
    stored_path: &Path,
    query_path: &Path,
    out_dir: &Path,
) -> Result<CommandOutput> {
    let stored = read_words(stored_path)?;
    let queries = read_words(query_path)?;
    if queries.len() != 1 {
        return Err(Error::Shape(format!(
            "query file must contain exactly one word, found {}",
            queries.len()
        )));
    }
    let query = &queries[0];
    let dim = stored[0].len();
    if query.len() != dim {
        return Err(Error::Shape(format!(
            "query has {} bits, stored words have {dim}",
            query.len()
        )));
    }
    if stored.len() < 2 {
        return Err(Error::Shape("a search needs at least two stored words".into()));
    }

    let max_norm = stored.iter().map(|w| w.popcount()).max().unwrap().max(1);
    let scale = if cfg.array.scale_factor != 1.0 {
        cfg.array.scale_factor
    } else {
        scale_for_iy_target(&cfg.device.cell, max_norm, cfg.mc.iy_target)
    };
    let geometry = ArrayGeometry::new(stored.len(), dim).with_scale(scale);
    let spec = cfg.seeded_variation();
    let mut rng = stream_rng(cfg.master_seed, 0);
    let supply = spec.sample_supply_factor(&mut rng);
    let arr = program(stored.clone(), geometry, &cfg.device.cell, &spec, &mut rng)?;
    let rc = arr.row_currents_scaled(query, supply)?;
    let sims = row_similarities(&rc.ix, &rc.iy, &cfg.translinear)?;
    let mut iz: Vec<f64> = sims
        .iter()
        .map(|s| s.iz * spec.sample_row_mismatch(&mut rng))
        .collect();
    // Rows sharing no bit with the query carry zero current; lift them to
    // a relative floor so the solver sees positive rails (they cannot win).
    let max_iz = iz.iter().cloned().fold(0.0f64, f64::max);
    if max_iz <= 0.0 {
        return Err(Error::Domain("query matches no stored bit".into()));
    }
    for z in iz.iter_mut() {
        *z = z.max(max_iz * 1e-12);
    }

    let wta_cfg = WtaConfig {
        m: stored.len(),
        ..cfg.wta.clone()
    };
    let sol = solve_static(&iz, &wta_cfg)?;
    let dominant = sol
        .i_out
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != sol.winner)
        .all(|(_, out)| sol.i_out[sol.winner] >= wta_cfg.dominance_factor * *out);

    let mut rows = Vec::new();
    let mut oracle_best = 0usize;
    let mut oracle_best_val = -1.0;
    for (m, word) in stored.iter().enumerate() {
        let cos_sq = exact_cos_sq(query, word)?.value;
        if cos_sq > oracle_best_val {
            oracle_best_val = cos_sq;
            oracle_best = m;
        }
        rows.push(SearchRow {
            row: m,
            stored_popcount: word.popcount(),
            ix: rc.ix[m],
            iy: rc.iy[m],
            iz: iz[m],
            in_region: sims[m].in_region,
            oracle_cos_sq: cos_sq,
        });
    }
    let report = SearchReport {
        rows,
        winner: sol.winner,
        oracle_argmax: oracle_best,
        oracle_agreement: sol.winner == oracle_best,
        resolvable: sol.converged && dominant,
        wta_converged: sol.converged,
        wta_margin: sol.margin,
        wta_rails: (cfg.verbosity >= 2).then(|| sol.v_rails.clone()),
        wta_outputs: (cfg.verbosity >= 2).then(|| sol.i_out.clone()),
    };

    let mut out = CommandOutput::default();
    out.note(format!(
        "search: winner = row {} (oracle argmax = row {}, agreement = {})",
        report.winner, report.oracle_argmax, report.oracle_agreement
    ));
    out.write(out_dir, "search_report.json", &to_json(&report))?;
    out.write_resolved_config(out_dir, cfg)?;
    Ok(out)
}

/// Run the configured Monte Carlo experiment.
pub fn cmd_mc(cfg: &RunConfig, trials_override: Option<usize>, out_dir: &Path) -> Result<CommandOutput> {
    let scenario = match cfg.mc.scenario.as_str() {
        "worst_case" => Scenario::WorstCasePair,
        "similarity_sweep" => Scenario::SimilaritySweep {
            bins: cfg.mc.bins.clone(),
        },
        other => return Err(Error::Config(format!("unknown mc scenario '{other}'"))),
    };
    let exp = McExperiment {
        trials: trials_override.unwrap_or(cfg.mc.trials),
        spec: cfg.seeded_variation(),
        scenario,
        dim: cfg.mc.dim,
        iy_target: cfg.mc.iy_target,
        master_seed: cfg.master_seed,
        log_trials: cfg.mc.log_trials || cfg.verbosity >= 2,
    };
    let result = run_mc(&exp, &cfg.pipeline())?;

    let mut out = CommandOutput::default();
    out.note(format!(
        "mc: {} trials, accuracy {:.4}",
        result.trials, result.accuracy
    ));
    out.write(out_dir, "mc_result.json", &to_json(&result))?;
    if !result.error_rate_by_bin.is_empty() {
        let mut csv = String::from("competitor_cos,error_rate,trials\n");
        for b in &result.error_rate_by_bin {
            writeln!(csv, "{},{},{}", b.competitor_cos, b.error_rate, b.trials).unwrap();
            out.note(format!(
                "  bin cos = {:.4}: error rate {:.4}",
                b.competitor_cos, b.error_rate
            ));
        }
        out.write(out_dir, "error_rates.csv", &csv)?;
    }
    out.write_resolved_config(out_dir, cfg)?;
    Ok(out)
}

/// Sweep axes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepAxis {
    Rows,
    Dims,
    Margin,
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<SweepAxis> {
        match s {
            "rows" => Ok(SweepAxis::Rows),
            "dims" => Ok(SweepAxis::Dims),
            "margin" => Ok(SweepAxis::Margin),
            other => Err(Error::Config(format!(
                "unknown sweep axis '{other}' (expected rows, dims or margin)"
            ))),
        }
    }
}

/// Sweep a geometry or margin axis; emits one CSV.
pub fn cmd_sweep(cfg: &RunConfig, axis: SweepAxis, out_dir: &Path) -> Result<CommandOutput> {
    let mut out = CommandOutput::default();
    let csv = match axis {
        SweepAxis::Rows => {
            let mut csv = String::from("rows,energy_j,latency_s,area_m2\n");
            for rows in [4usize, 8, 16, 32, 64, 128, 256] {
                let rep = estimate(&ArrayGeometry::new(rows, cfg.array.dim), &cfg.cost)?;
                writeln!(csv, "{},{:e},{:e},{:e}", rows, rep.energy, rep.latency, rep.area).unwrap();
            }
            out.note("sweep rows: energy linear in rows, latency constant".to_string());
            csv
        }
        SweepAxis::Dims => {
            let mut csv = String::from("dims,energy_j,latency_s,area_m2\n");
            for dim in [64usize, 128, 256, 512, 1024] {
                let rep = estimate(&ArrayGeometry::new(cfg.array.rows.max(2), dim), &cfg.cost)?;
                writeln!(csv, "{},{:e},{:e},{:e}", dim, rep.energy, rep.latency, rep.area).unwrap();
            }
            out.note("sweep dims: energy and latency flat under current tuning".to_string());
            csv
        }
        SweepAxis::Margin => {
            let mut csv = String::from("margin,correct_fraction,resolvable_fraction\n");
            let instances = 200;
            let m = cfg.wta.m.max(2);
            for (i, margin) in [0.001f64, 0.002, 0.005, 0.01, 0.02, 0.05]
                .into_iter()
                .enumerate()
            {
                let mut correct = 0usize;
                let mut resolvable = 0usize;
                let mut rng = stream_rng(cfg.master_seed, 40_000 + i as u64);
                for _ in 0..instances {
                    let mut iz: Vec<f64> = (0..m)
                        .map(|_| rand::Rng::gen_range(&mut rng, 50e-9..500e-9))
                        .collect();
                    let best = rand::Rng::gen_range(&mut rng, 0..m);
                    let max_other = iz
                        .iter()
                        .enumerate()
                        .filter(|(j, _)| *j != best)
                        .map(|(_, v)| *v)
                        .fold(0.0f64, f64::max);
                    iz[best] = max_other * (1.0 + margin);
                    let (winner, ok) = crate::wta::resolve_winner(&iz, &WtaConfig {
                        m,
                        ..cfg.wta.clone()
                    })?;
                    if winner == best {
                        correct += 1;
                        if ok {
                            resolvable += 1;
                        }
                    }
                }
                writeln!(
                    csv,
                    "{},{},{}",
                    margin,
                    correct as f64 / instances as f64,
                    resolvable as f64 / instances as f64
                )
                .unwrap();
            }
            out.note("sweep margin: winner correctness vs input margin".to_string());
            csv
        }
    };
    let name = match axis {
        SweepAxis::Rows => "sweep_rows.csv",
        SweepAxis::Dims => "sweep_dims.csv",
        SweepAxis::Margin => "sweep_margin.csv",
    };
    out.write(out_dir, name, &csv)?;
    out.write_resolved_config(out_dir, cfg)?;
    Ok(out)
}

/// Cost estimate plus baseline ratio table.
pub fn cmd_cost(cfg: &RunConfig, out_dir: &Path) -> Result<CommandOutput> {
    let report = estimate(&cfg.array, &cfg.cost)?;
    let baselines = Baselines::bundled();
    let ratios = compare_to_baselines(&report, &baselines);

    let mut out = CommandOutput::default();
    out.note(format!(
        "cost: {} rows × {} bits → energy {:.3e} J, latency {:.3e} s, area {:.3e} m²",
        report.rows, report.dim, report.energy, report.latency, report.area
    ));
    let mut csv = String::from("name,metric,energy_ratio,latency_ratio,area_ratio\n");
    for r in &ratios {
        writeln!(
            csv,
            "{},{},{:.4},{:.4},{:.4}",
            r.name, r.metric, r.energy_ratio, r.latency_ratio, r.area_ratio
        )
        .unwrap();
        out.note(format!(
            "  vs {}: energy ×{:.1}, latency ×{:.2}",
            r.name, r.energy_ratio, r.latency_ratio
        ));
    }
    out.write(out_dir, "cost_report.json", &to_json(&report))?;
    out.write(out_dir, "baseline_ratios.csv", &csv)?;
    out.write_resolved_config(out_dir, cfg)?;
    Ok(out)
}

/// HDC actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HdcAction {
    Train,
    Eval,
}

impl std::str::FromStr for HdcAction {
    type Err = Error;

    fn from_str(s: &str) -> Result<HdcAction> {
        match s {
            "train" => Ok(HdcAction::Train),
            "eval" => Ok(HdcAction::Eval),
            other => Err(Error::Config(format!(
                "unknown hdc action '{other}' (expected train or eval)"
            ))),
        }
    }
}

fn resolve_dataset(cfg: &RunConfig, data_override: Option<(&Path, &Path)>) -> Result<Split> {
    if let Some((train, test)) = data_override {
        return Split::from_csv_pair(train, test);
    }
    Ok(match &cfg.hdc.dataset {
        DatasetRef::IsoletLike { seed } => isolet_like(*seed),
        DatasetRef::UciharLike { seed } => ucihar_like(*seed),
        DatasetRef::FaceLike { seed } => face_like(*seed),
        DatasetRef::Csv { train, test } => Split::from_csv_pair(train, test)?,
    })
}

fn parse_backends(names: &[String]) -> Result<Vec<Backend>> {
    names
        .iter()
        .map(|n| match n.as_str() {
            "cosine" => Ok(Backend::OracleCosine),
            "hamming" => Ok(Backend::OracleHamming),
            "simulated_am" => Ok(Backend::SimulatedAm),
            other => Err(Error::Config(format!("unknown backend '{other}'"))),
        })
        .collect()
}

/// Train a model or evaluate accuracy tables.
pub fn cmd_hdc(
    cfg: &RunConfig,
    action: HdcAction,
    data_override: Option<(&Path, &Path)>,
    out_dir: &Path,
) -> Result<CommandOutput> {
    let split = resolve_dataset(cfg, data_override)?;
    let max_dim = *cfg.hdc.dims.iter().max().unwrap();
    let enc = Encoder {
        dim: max_dim,
        n_features: split.train.n_features,
        projection_seed: if cfg.hdc.encoder.projection_seed == 0 {
            cfg.master_seed
        } else {
            cfg.hdc.encoder.projection_seed
        },
        ..cfg.hdc.encoder.clone()
    };

    let mut out = CommandOutput::default();
    match action {
        HdcAction::Train => {
            let model = train_single_pass(&split.train, &enc)?;
            out.note(format!(
                "hdc train: {} classes, D = {}, {} training samples",
                model.classes.len(),
                model.dim(),
                split.train.len()
            ));
            // Smoke-check the programmed AM accepts the model.
            SimulatedAm::program_model(&model, &AmOptions {
                pipeline: cfg.pipeline(),
                iy_target: cfg.hdc.iy_target,
                ..AmOptions::default()
            })?;
            out.write(out_dir, "model.json", &model.to_json())?;
        }
        HdcAction::Eval => {
            let backends = parse_backends(&cfg.hdc.backends)?;
            let am_opts = AmOptions {
                pipeline: cfg.pipeline(),
                iy_target: cfg.hdc.iy_target,
                seed: cfg.master_seed,
                error_injection: cfg.hdc.error_injection.clone(),
                ..AmOptions::default()
            };
            let rows = evaluate(&split, &enc, &cfg.hdc.dims, &backends, &am_opts)?;
            let mut csv = String::from("dim,metric,accuracy\n");
            for r in &rows {
                writeln!(csv, "{},{},{}", r.dim, r.metric, r.accuracy).unwrap();
                out.note(format!(
                    "hdc eval: D = {:<5} {:<12} accuracy {:.4}",
                    r.dim, r.metric, r.accuracy
                ));
            }
            out.write(out_dir, "accuracy.csv", &csv)?;
            out.write(out_dir, "accuracy.json", &to_json::<Vec<AccuracyRow>>(&rows))?;
        }
    }
    out.write_resolved_config(out_dir, cfg)?;
    Ok(out)
}
