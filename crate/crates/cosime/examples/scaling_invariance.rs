//! Row-scaling invariance: growing the array row-wise by k while dividing
//! every cell current by k (resistor tuning) and restoring the factor in
//! the translinear mirror leaves each row's similarity current unchanged.
//!
//! ```bash
//! cargo run --release -p cosime --example scaling_invariance
//! ```

use cosime::array::{scaled_equivalence_check, BinaryVector};
use cosime::device::CellParams;
use cosime::translinear::{squared_ratio, TranslinearConfig};

fn main() {
    let stored: Vec<BinaryVector> = ["1011010010110100", "1001101010011010", "1110001011100010"]
        .iter()
        .map(|s| s.parse().unwrap())
        .collect();

    println!("k | per-row Iz identical after scaling");
    for k in [1.0, 2.0, 4.0, 8.0] {
        let ok = scaled_equivalence_check(&stored, 16, &CellParams::default(), k, 1e-9).unwrap();
        println!("{k:>1} | {ok}");
        assert!(ok);
    }

    // The same identity at the functional level: inputs divided by N with
    // a mirror gain of N reproduce Iz bit-for-bit.
    let base = TranslinearConfig::default();
    let ix = 240e-9;
    let iy = 480e-9;
    let reference = squared_ratio(ix, iy, &base).unwrap().iz;
    println!("\nN | Iz(ix/N, iy/N) with mirror gain N (nA)");
    for n in [2.0, 4.0, 8.0] {
        let cfg = TranslinearConfig {
            mirror_ratio: n,
            ..TranslinearConfig::default()
        };
        let iz = squared_ratio(ix / n, iy / n, &cfg).unwrap().iz;
        println!("{n:>1} | {:.6} (reference {:.6})", iz * 1e9, reference * 1e9);
        assert_eq!(iz, reference);
    }
}
