//! Error rate versus competitor similarity: one stored word is held at
//! cos = 0.5 and the competitor is swept toward it. The search error rate
//! rises as the two similarity currents close in on each other.
//!
//! ```bash
//! cargo run --release -p cosime --example similarity_sweep
//! ```

use cosime::variation::{default_sweep_bins, run_mc, McExperiment, McPipeline, Scenario};

fn main() {
    let exp = McExperiment {
        trials: 2000,
        scenario: Scenario::SimilaritySweep {
            bins: default_sweep_bins(),
        },
        master_seed: 3,
        ..McExperiment::default()
    };
    let result = run_mc(&exp, &McPipeline::default()).unwrap();

    println!("competitor cos | error rate  (reference word at cos = 0.5)");
    let mut bins = result.error_rate_by_bin.clone();
    bins.sort_by(|a, b| a.competitor_cos.partial_cmp(&b.competitor_cos).unwrap());
    for b in &bins {
        println!("       {:.4}  | {:.4}", b.competitor_cos, b.error_rate);
    }
    let max = bins.iter().map(|b| b.error_rate).fold(0.0f64, f64::max);
    println!("\nmaximum error rate: {:.1}%", max * 100.0);
}
