//! Cost model: the calibrated per-bit energy / latency / area numbers,
//! geometry scaling trends, and the ratio table against published
//! associative-memory designs.
//!
//! ```bash
//! cargo run --release -p cosime --example cost_comparison
//! ```

use cosime::array::ArrayGeometry;
use cosime::cost::{compare_to_baselines, estimate, Baselines, CostParams};

fn main() {
    let p = CostParams::default();
    let reference = estimate(&ArrayGeometry::new(256, 1024), &p).unwrap();
    println!(
        "reference 256×1024 array: energy {:.2} pJ, latency {:.1} ns",
        reference.energy * 1e12,
        reference.latency * 1e9
    );
    for (k, v) in &reference.energy_breakdown {
        println!("  {k:<12} {:.2} pJ", v * 1e12);
    }

    println!("\nrows | energy (pJ) | latency (ns)   [linear in rows, flat latency]");
    for rows in [64usize, 128, 256, 512] {
        let r = estimate(&ArrayGeometry::new(rows, 1024), &p).unwrap();
        println!("{rows:>4} | {:>10.2} | {:.1}", r.energy * 1e12, r.latency * 1e9);
    }

    println!("\ndims | energy (pJ) | latency (ns)   [flat under current tuning]");
    for dim in [64usize, 256, 1024] {
        let r = estimate(&ArrayGeometry::new(256, dim), &p).unwrap();
        println!("{dim:>4} | {:>10.2} | {:.1}", r.energy * 1e12, r.latency * 1e9);
    }

    println!("\nbaseline ratios (baseline / this design):");
    println!("{:<18} {:<14} energy   latency  area", "name", "metric");
    for r in compare_to_baselines(&reference, &Baselines::bundled()) {
        println!(
            "{:<18} {:<14} ×{:<7.2} ×{:<7.2} ×{:.2}",
            r.name, r.metric, r.energy_ratio, r.latency_ratio, r.area_ratio
        );
    }
}
