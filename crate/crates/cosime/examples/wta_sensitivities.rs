//! Closed-form winner-take-all sensitivities against finite differences
//! of the static solver.
//!
//! At an equal-input operating point the winner rail's voltage slope is
//! ((M−1)/M)·V_A/I_z and each loser moves by −(1/M)·V_A/I_z; with a
//! dominant winner the slopes collapse to V_T/I_z and −V_A/I_z. Both
//! limits fall out of the solved network.
//!
//! ```bash
//! cargo run --release -p cosime --example wta_sensitivities
//! ```

use cosime::wta::{small_signal_sensitivities, solve_static, verify_sensitivities, WtaConfig};

fn main() {
    println!("equal inputs, winner slope vs rail count:");
    println!("  M | analytic (V/A) | (M-1)/M · V_A/Iz | FD deviation");
    for m in [2usize, 4, 8, 16] {
        let cfg = WtaConfig {
            feedback_gain: 0.0,
            ..WtaConfig::new(m)
        };
        let iz = vec![150e-9; m];
        let sol = solve_static(&iz, &cfg).unwrap();
        let sens = small_signal_sensitivities(&sol, 0, &cfg).unwrap();
        let formula = (m as f64 - 1.0) / m as f64 * cfg.mosfet.v_a / iz[0];
        let check = verify_sensitivities(&iz, &cfg, 0, 1e-4).unwrap();
        println!(
            " {m:>2} | {:>14.4e} | {:>16.4e} | {:.3e}",
            sens[0], formula, check.max_rel_deviation
        );
    }

    println!("\ndominant winner (rail 0 at 200 nA, others 150 nA), M = 4:");
    let cfg = WtaConfig {
        feedback_gain: 0.0,
        ..WtaConfig::new(4)
    };
    let iz = vec![200e-9, 150e-9, 150e-9, 150e-9];
    let sol = solve_static(&iz, &cfg).unwrap();
    let sens = small_signal_sensitivities(&sol, 0, &cfg).unwrap();
    println!(
        "  winner slope {:.4e} (V_T/Iz = {:.4e})",
        sens[0],
        cfg.mosfet.v_t / iz[0]
    );
    println!(
        "  loser slope  {:.4e} (−V_A/Iz = {:.4e})",
        sens[1],
        -cfg.mosfet.v_a / iz[0]
    );
    let check = verify_sensitivities(&iz, &cfg, 0, 1e-4).unwrap();
    println!("  finite-difference deviation: {:.3e}", check.max_rel_deviation);
}
