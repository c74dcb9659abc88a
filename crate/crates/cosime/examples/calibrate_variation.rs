//! One-time calibration sweep of the variation model's free knobs.
//!
//! The FeFET threshold, resistor, MOSFET and supply spreads are fixed at
//! their published values; the free parameters are how much of the MOSFET
//! spread lands as uncorrelated per-row mismatch (`mos_mismatch_transfer`),
//! the WTA bias current, and the dominance factor. This sweep picks the
//! transfer value whose worst-case search accuracy lands closest to 0.90
//! and confirms the result is insensitive to the bias/dominance knobs.
//! The shipped default (0.15) comes from this run.
//!
//! ```bash
//! cargo run --release -p cosime --example calibrate_variation
//! ```

use cosime::device::VariationSpec;
use cosime::variation::{run_mc, McExperiment, McPipeline};
use cosime::wta::WtaConfig;

fn accuracy(transfer: f64, i_bias: f64, dominance: f64, seed: u64, trials: usize) -> f64 {
    let exp = McExperiment {
        trials,
        spec: VariationSpec {
            mos_mismatch_transfer: transfer,
            ..VariationSpec::default()
        },
        master_seed: seed,
        ..McExperiment::default()
    };
    let pipe = McPipeline {
        wta: WtaConfig {
            i_bias,
            dominance_factor: dominance,
            ..WtaConfig::default()
        },
        ..McPipeline::default()
    };
    run_mc(&exp, &pipe).unwrap().accuracy
}

fn main() {
    let trials = 10_000;
    let seeds = [11u64, 77, 123];

    println!("transfer | worst-case accuracy (mean over {} seeds × {trials} trials)", seeds.len());
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for transfer in [0.0, 0.05, 0.10, 0.12, 0.15, 0.18, 0.21, 0.25, 0.30] {
        let mean: f64 = seeds
            .iter()
            .map(|&s| accuracy(transfer, 600e-9, 2.0, s, trials))
            .sum::<f64>()
            / seeds.len() as f64;
        let miss = (mean - 0.90f64).abs();
        if miss < best.0 {
            best = (miss, transfer, mean);
        }
        println!("  {transfer:<6} | {mean:.4}");
    }
    println!(
        "\nselected mos_mismatch_transfer = {} (accuracy {:.4})",
        best.1, best.2
    );

    println!("\nsensitivity to the other knobs at the selected transfer:");
    for (i_bias, dominance) in [(300e-9, 2.0), (600e-9, 2.0), (1200e-9, 2.0), (600e-9, 1.5), (600e-9, 3.0)] {
        let acc = accuracy(best.1, i_bias, dominance, seeds[0], trials);
        println!(
            "  i_bias {:>6.0} nA, dominance {dominance:.1} → accuracy {acc:.4}",
            i_bias * 1e9
        );
    }
}
