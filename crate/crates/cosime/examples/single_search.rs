//! One end-to-end search: program two arrays with a handful of words,
//! drive a query through the dot-product/norm arrays, the translinear
//! squarer-divider, and the winner-take-all stage, then check the outcome
//! against the exact cosine oracle.
//!
//! ```bash
//! cargo run --release -p cosime --example single_search
//! ```

use cosime::array::{program, scale_for_iy_target, ArrayGeometry, BinaryVector};
use cosime::device::{CellParams, VariationSpec};
use cosime::hdc::exact_cos_sq;
use cosime::rng::stream_rng;
use cosime::translinear::{row_similarities, TranslinearConfig};
use cosime::wta::{solve_static, WtaConfig};

fn main() {
    let stored: Vec<BinaryVector> = [
        "1111000011110000",
        "1110000011110001",
        "1100110000111100",
        "0001111100001111",
    ]
    .iter()
    .map(|s| s.parse().unwrap())
    .collect();
    let query: BinaryVector = "1111000011010000".parse().unwrap();

    let cell = CellParams::default();
    let max_norm = stored.iter().map(|w| w.popcount()).max().unwrap();
    let scale = scale_for_iy_target(&cell, max_norm, 600e-9);
    let geometry = ArrayGeometry::new(stored.len(), query.len()).with_scale(scale);

    let mut rng = stream_rng(42, 0);
    let arr = program(stored.clone(), geometry, &cell, &VariationSpec::zero(), &mut rng).unwrap();
    let rc = arr.row_currents(&query).unwrap();
    let sims = row_similarities(&rc.ix, &rc.iy, &TranslinearConfig::default()).unwrap();
    let iz: Vec<f64> = sims.iter().map(|s| s.iz).collect();

    println!("row | ix (nA) | iy (nA) | iz (nA) | in-region | oracle cos²");
    for (m, word) in stored.iter().enumerate() {
        let oracle = exact_cos_sq(&query, word).unwrap().value;
        println!(
            "{m:>3} | {:>7.1} | {:>7.1} | {:>7.2} | {:>9} | {oracle:.4}",
            rc.ix[m] * 1e9,
            rc.iy[m] * 1e9,
            iz[m] * 1e9,
            sims[m].in_region,
        );
    }

    let sol = solve_static(&iz, &WtaConfig::new(stored.len())).unwrap();
    let oracle_best = (0..stored.len())
        .max_by(|&a, &b| {
            let sa = exact_cos_sq(&query, &stored[a]).unwrap().value;
            let sb = exact_cos_sq(&query, &stored[b]).unwrap().value;
            sa.partial_cmp(&sb).unwrap()
        })
        .unwrap();
    println!(
        "\nWTA winner: row {} (converged = {}, input margin = {:.2}%)",
        sol.winner,
        sol.converged,
        sol.margin * 100.0
    );
    println!("oracle argmax cos²: row {oracle_best}");
    assert_eq!(sol.winner, oracle_best);
    println!("agreement: true");
}
