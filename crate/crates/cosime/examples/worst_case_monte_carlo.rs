//! Monte Carlo robustness at the hardest discrimination point: two stored
//! words whose squared similarities to the query are exactly 1/4 and 1/5
//! and which differ by a single bit of the norm array. Device variation
//! (FeFET thresholds, resistor, MOSFET, supply) is sampled per trial.
//!
//! ```bash
//! cargo run --release -p cosime --example worst_case_monte_carlo
//! ```

use cosime::device::VariationSpec;
use cosime::variation::{run_mc, worst_case_scenario, McExperiment, McPipeline};

fn main() {
    let inst = worst_case_scenario(1024).unwrap();
    println!(
        "worst-case pair at D = 1024: norms {} and {}, Hamming distance {}",
        inst.stored[0].popcount(),
        inst.stored[1].popcount(),
        inst.stored[0].hamming(&inst.stored[1])
    );

    let exp = McExperiment {
        trials: 2000,
        spec: VariationSpec::default(),
        master_seed: 7,
        ..McExperiment::default()
    };
    let result = run_mc(&exp, &McPipeline::default()).unwrap();
    println!(
        "{} trials with full device variation: accuracy {:.3}",
        result.trials, result.accuracy
    );

    let zero = McExperiment {
        trials: 500,
        spec: VariationSpec::zero(),
        master_seed: 7,
        ..McExperiment::default()
    };
    let clean = run_mc(&zero, &McPipeline::default()).unwrap();
    println!("zero-variation control: accuracy {:.3}", clean.accuracy);
}
