//! M-rail winner-take-all network.
//!
//! M-rail winner-take-all network.
//!
//! The static system has M+1 unknowns: the rail voltages V_1..V_M and the
//! common node V_c shared by the sourcing-transistor gates and the output
//! transistor sources. Per rail the sourcing transistor must sink the
//! input current through its drain-voltage dependence,
//!
//! ```text
//! Iz_i = I_s · exp(V_c/(η·V_T)) · exp(V_i/V_A)
//! ```
//!
//! and the output transistors split the bias current,
//!
//! ```text
//! I_oi = I_o · exp((V_i − V_c)/V_T),    Σ I_oi = I_bias.
//! ```
//!
//! The exponential Early characteristic has output conductance I/V_A at
//! every operating point — exactly the small-signal resistance V_A/I that
//! the closed-form sensitivities in [`small_signal_sensitivities`] are
//! built on — and reduces to the familiar 1 + V/V_A form for |V| ≪ V_A.
//! That makes the closed forms exact limits of this solver for V_A ≫ V_T
//! at every operating point, not just near V = 0. An optional feedback
//! mirror adds each rail's output current back onto its input, sharpening
//! the winner before the dominance test in [`resolve_winner`].

use serde::{Deserialize, Serialize};

use crate::device::MosfetParams;
use crate::error::{Error, Result};

/// WTA configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WtaConfig {
    /// Rail count.
    pub m: usize,
    /// Common-source bias current I_c (A). Default 600 nA.
    pub i_bias: f64,
    /// Transistor parameters (I_o reference, V_T, V_A). The slope factor
    /// defaults to 1 here: the closed-form rail sensitivities assume a
    /// unit subthreshold slope, and with η = 1 they are exact limits of
    /// the solver.
    pub mosfet: MosfetParams,
    /// Feedback mirror gain α; 0 disables feedback. Default 1.
    pub feedback_gain: f64,
    /// Maximum feedback fixed-point iterations.
    pub feedback_iters: usize,
    /// Smallest input margin the network is asked to resolve. Default 1%.
    pub resolution_target: f64,
    /// A winner must exceed every other rail's output by this factor to
    /// count as resolved. Default 2.
    pub dominance_factor: f64,
    /// Newton iteration cap.
    pub max_newton_iters: usize,
    /// Relative residual target of the Newton solve.
    pub residual_tol: f64,
}

impl Default for WtaConfig {
    fn default() -> Self {
        Self {
            m: 2,
            i_bias: 600e-9,
            mosfet: MosfetParams {
                eta: 1.0,
                ..MosfetParams::default()
            },
            feedback_gain: 1.0,
            feedback_iters: 50,
            resolution_target: 0.01,
            dominance_factor: 2.0,
            max_newton_iters: 200,
            residual_tol: 1e-12,
        }
    }
}

impl WtaConfig {
    pub fn new(m: usize) -> Self {
        Self {
            m,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.mosfet.validate()?;
        if self.m < 2 {
            return Err(Error::Config("WTA needs at least two rails".into()));
        }
        if self.i_bias <= 0.0 {
            return Err(Error::Config("i_bias must be positive".into()));
        }
        if self.feedback_gain < 0.0 {
            return Err(Error::Config("feedback_gain must be >= 0".into()));
        }
        if self.mosfet.v_a.is_infinite() {
            return Err(Error::Config(
                "WTA solve needs a finite Early voltage".into(),
            ));
        }
        Ok(())
    }
}

/// Solved operating point of the network.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WtaSolution {
    /// Rail voltages V_1..V_M (V).
    pub v_rails: Vec<f64>,
    /// Common node voltage V_c (V).
    pub v_common: f64,
    /// Output branch currents I_o1..I_oM (A).
    pub i_out: Vec<f64>,
    /// Index of the largest output (lowest index on exact ties).
    pub winner: usize,
    /// Relative input margin: (largest − second largest)/largest.
    pub margin: f64,
    /// Effective input currents the solve converged on (inputs plus
    /// feedback when enabled).
    pub iz_effective: Vec<f64>,
    pub converged: bool,
    /// Final scaled Newton residual.
    pub newton_residual: f64,
}

fn exp_capped(x: f64) -> f64 {
    x.min(700.0).exp()
}

fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

fn relative_margin(iz: &[f64]) -> f64 {
    let w = argmax(iz);
    let second = iz
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != w)
        .map(|(_, v)| *v)
        .fold(f64::NEG_INFINITY, f64::max);
    (iz[w] - second) / iz[w]
}

/// One damped-Newton solve of the static system at fixed inputs.
/// Returns (v_rails, v_common, residual, converged).
fn newton_core(
    iz: &[f64],
    cfg: &WtaConfig,
    warm_start: Option<(&[f64], f64)>,
) -> (Vec<f64>, f64, f64, bool) {
    let m = iz.len();
    let p = &cfg.mosfet;
    let i_s = p.i_ref();
    let i_o = p.i_ref();
    let eta_vt = p.eta * p.v_t;
    let vt = p.v_t;
    let va = p.v_a;

    // Initial guess: V_c from the single-rail closed form at V_i = 0,
    // or the caller-provided operating point.
    let mean_iz = iz.iter().sum::<f64>() / m as f64;
    let (mut v, mut v_c) = match warm_start {
        Some((v0, vc0)) => (v0.to_vec(), vc0),
        None => (vec![0.0; m], eta_vt * (mean_iz / i_s).ln()),
    };

    let residual = |v: &[f64], v_c: f64| -> (Vec<f64>, f64) {
        let u = i_s * exp_capped(v_c / eta_vt);
        let mut f = Vec::with_capacity(m + 1);
        for i in 0..m {
            f.push((u * exp_capped(v[i] / va) - iz[i]) / iz[i]);
        }
        let sum_out: f64 = v.iter().map(|vi| i_o * exp_capped((vi - v_c) / vt)).sum();
        f.push((sum_out - cfg.i_bias) / cfg.i_bias);
        let norm = f.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
        (f, norm)
    };

    let (mut f, mut norm) = residual(&v, v_c);
    let mut converged = norm < cfg.residual_tol;

    for _ in 0..cfg.max_newton_iters {
        if norm < cfg.residual_tol {
            converged = true;
            break;
        }
        let u = i_s * exp_capped(v_c / eta_vt);
        // Arrow-structured Jacobian of the scaled residuals: diagonal rail
        // block, dense last row/column. Eliminate the rail rows first.
        //   rail i:  d_i·dV_i + c_i·dV_c = −f_i
        //   output:  Σ g_i·dV_i + g_c·dV_c = −f_out
        let mut num = -f[m];
        let mut den = 0.0;
        let mut rail_d = Vec::with_capacity(m);
        let mut rail_c = Vec::with_capacity(m);
        for i in 0..m {
            let drain = u * exp_capped(v[i] / va);
            let d_i = drain / va / iz[i];
            let c_i = drain / eta_vt / iz[i];
            let i_oi = i_o * exp_capped((v[i] - v_c) / vt);
            let g_i = i_oi / vt / cfg.i_bias;
            let g_c = -i_oi / vt / cfg.i_bias;
            num += g_i * f[i] / d_i;
            den += g_c - g_i * c_i / d_i;
            rail_d.push(d_i);
            rail_c.push(c_i);
        }
        if den == 0.0 || !den.is_finite() || !num.is_finite() {
            break;
        }
        let mut dv_c = num / den;
        let mut dv = vec![0.0; m];
        for i in 0..m {
            dv[i] = (-f[i] - rail_c[i] * dv_c) / rail_d[i];
        }

        // Junction-style step limiting: a raw Newton step can push an
        // exponent argument up by hundreds, far outside the linearization.
        // Scale the step so no exponent grows by more than EXP_LIMIT per
        // iteration (downward moves only underflow currents and are safe);
        // rail voltages themselves may travel volts, capped at V_A.
        let step_norm = dv
            .iter()
            .chain(std::iter::once(&dv_c))
            .fold(0.0f64, |acc, x| acc.max(x.abs()));
        if !step_norm.is_finite() {
            break;
        }
        const EXP_LIMIT: f64 = 3.0;
        let mut scale: f64 = 1.0;
        if step_norm > va {
            scale = va / step_norm;
        }
        let up_c = dv_c / eta_vt;
        if up_c > EXP_LIMIT {
            scale = scale.min(EXP_LIMIT / up_c);
        }
        for d in dv.iter() {
            let up_out = (d - dv_c) / vt;
            if up_out > EXP_LIMIT {
                scale = scale.min(EXP_LIMIT / up_out);
            }
            let up_rail = d / va;
            if up_rail > EXP_LIMIT {
                scale = scale.min(EXP_LIMIT / up_rail);
            }
        }
        if scale < 1.0 {
            for d in dv.iter_mut() {
                *d *= scale;
            }
            dv_c *= scale;
        }

        // Damped update: halve the step while the residual norm grows.
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let v_trial: Vec<f64> = v
                .iter()
                .zip(&dv)
                .map(|(vi, d)| vi + lambda * d)
                .collect();
            let v_c_trial = v_c + lambda * dv_c;
            let (f_trial, norm_trial) = residual(&v_trial, v_c_trial);
            if norm_trial < norm || norm_trial < cfg.residual_tol {
                v = v_trial;
                v_c = v_c_trial;
                f = f_trial;
                norm = norm_trial;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if norm < cfg.residual_tol {
        converged = true;
    }
    (v, v_c, norm, converged)
}

fn build_solution(
    iz_input: &[f64],
    iz_effective: Vec<f64>,
    v: Vec<f64>,
    v_c: f64,
    norm: f64,
    converged: bool,
    cfg: &WtaConfig,
) -> WtaSolution {
    let p = &cfg.mosfet;
    let i_out: Vec<f64> = v
        .iter()
        .map(|vi| p.i_ref() * exp_capped((vi - v_c) / p.v_t))
        .collect();
    WtaSolution {
        winner: argmax(&i_out),
        margin: relative_margin(iz_input),
        v_rails: v,
        v_common: v_c,
        i_out,
        iz_effective,
        converged: converged && norm < 1e-10,
        newton_residual: norm,
    }
}

/// Solve the static network for the given input currents.
///
/// With `feedback_gain > 0` the solve is wrapped in the mirror fixed
/// point `iz ← iz_input + α·i_out`, iterated until the outputs move by
/// less than 1e-6 relative or `feedback_iters` is reached. Non-convergence
/// is reported through `converged`, not an error.
pub fn solve_static(iz: &[f64], cfg: &WtaConfig) -> Result<WtaSolution> {
    cfg.validate()?;
    if iz.len() != cfg.m {
        return Err(Error::Shape(format!(
            "expected {} input rails, got {}",
            cfg.m,
            iz.len()
        )));
    }
    if iz.iter().any(|z| *z <= 0.0 || !z.is_finite()) {
        return Err(Error::Domain(
            "WTA input currents must be positive and finite".into(),
        ));
    }

    let (v, v_c, norm, converged) = newton_core(iz, cfg, None);
    let mut sol = build_solution(iz, iz.to_vec(), v, v_c, norm, converged, cfg);
    if cfg.feedback_gain == 0.0 {
        return Ok(sol);
    }

    let mut iz_eff = iz.to_vec();
    for _ in 0..cfg.feedback_iters {
        let next: Vec<f64> = iz
            .iter()
            .zip(&sol.i_out)
            .map(|(base, out)| base + cfg.feedback_gain * out)
            .collect();
        let (v, v_c, norm, converged) = {
            let warm = newton_core(&next, cfg, Some((&sol.v_rails, sol.v_common)));
            if warm.3 {
                warm
            } else {
                newton_core(&next, cfg, None)
            }
        };
        let prev_out = sol.i_out.clone();
        iz_eff = next;
        sol = build_solution(iz, iz_eff.clone(), v, v_c, norm, converged, cfg);
        if !sol.converged {
            return Ok(sol);
        }
        let change = sol
            .i_out
            .iter()
            .zip(&prev_out)
            .map(|(a, b)| (a - b).abs() / a.abs().max(cfg.i_bias * 1e-18))
            .fold(0.0f64, f64::max);
        if change < 1e-6 {
            break;
        }
    }
    sol.iz_effective = iz_eff;
    Ok(sol)
}

/// Closed-form rail sensitivities at an operating point.
///
/// For a perturbation of rail `r`'s input current:
///
/// ```text
/// dV_r/dI_zr = (1/I_zr)·(V_T + V_A·(1 − s_r))
/// dV_j/dI_zr = −(V_A/I_zr)·s_r,              j ≠ r
/// ```
///
/// with the output share in its logistic form
/// `s_r = 1 / (1 + Σ_{j≠r} exp((V_j − V_r)/V_T))`. Returns the vector of
/// dV_j/dI_zr over all rails, entry `r` being the rail's own slope.
pub fn small_signal_sensitivities(
    op: &WtaSolution,
    perturbed_rail: usize,
    cfg: &WtaConfig,
) -> Result<Vec<f64>> {
    if !op.converged {
        return Err(Error::NonConvergence {
            residual: op.newton_residual,
        });
    }
    if perturbed_rail >= op.v_rails.len() {
        return Err(Error::Shape(format!(
            "rail {} out of range for M = {}",
            perturbed_rail,
            op.v_rails.len()
        )));
    }
    let p = &cfg.mosfet;
    let v_r = op.v_rails[perturbed_rail];
    let others: f64 = op
        .v_rails
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != perturbed_rail)
        .map(|(_, vj)| exp_capped((vj - v_r) / p.v_t))
        .sum();
    let share = 1.0 / (1.0 + others);
    let iz_r = op.iz_effective[perturbed_rail];
    let own = (p.v_t + p.v_a * (1.0 - share)) / iz_r;
    let other = -(p.v_a / iz_r) * share;
    Ok((0..op.v_rails.len())
        .map(|j| if j == perturbed_rail { own } else { other })
        .collect())
}

/// Comparison of the closed-form sensitivities against central finite
/// differences of the static solver.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SensitivityCheck {
    pub analytic: Vec<f64>,
    pub finite_difference: Vec<f64>,
    /// max_j |fd_j − analytic_j| / |analytic_j|
    pub max_rel_deviation: f64,
}

/// Finite-difference check of [`small_signal_sensitivities`] at input
/// `iz`, perturbing rail `perturbed_rail` by the relative step `h`.
/// Feedback is disabled for the check: the closed forms describe the core
/// network.
pub fn verify_sensitivities(
    iz: &[f64],
    cfg: &WtaConfig,
    perturbed_rail: usize,
    h: f64,
) -> Result<SensitivityCheck> {
    let core_cfg = WtaConfig {
        feedback_gain: 0.0,
        ..cfg.clone()
    };
    let base = solve_static(iz, &core_cfg)?;
    if !base.converged {
        return Err(Error::NonConvergence {
            residual: base.newton_residual,
        });
    }
    let analytic = small_signal_sensitivities(&base, perturbed_rail, &core_cfg)?;

    let delta = h * iz[perturbed_rail];
    let mut up = iz.to_vec();
    up[perturbed_rail] += delta;
    let mut down = iz.to_vec();
    down[perturbed_rail] -= delta;
    let sol_up = solve_static(&up, &core_cfg)?;
    let sol_down = solve_static(&down, &core_cfg)?;
    if !sol_up.converged || !sol_down.converged {
        return Err(Error::NonConvergence {
            residual: sol_up.newton_residual.max(sol_down.newton_residual),
        });
    }
    let finite_difference: Vec<f64> = sol_up
        .v_rails
        .iter()
        .zip(&sol_down.v_rails)
        .map(|(a, b)| (a - b) / (2.0 * delta))
        .collect();
    let max_rel_deviation = analytic
        .iter()
        .zip(&finite_difference)
        .map(|(a, fd)| (fd - a).abs() / a.abs())
        .fold(0.0f64, f64::max);
    Ok(SensitivityCheck {
        analytic,
        finite_difference,
        max_rel_deviation,
    })
}

/// Run the full search step: feedback-assisted solve plus the dominance
/// test. `resolvable` is true iff the solve converged and the winning
/// rail's output exceeds every other rail's by `dominance_factor`.
/// Exact input ties resolve to the lowest index with `resolvable = false`.
pub fn resolve_winner(iz: &[f64], cfg: &WtaConfig) -> Result<(usize, bool)> {
    let sol = solve_static(iz, cfg)?;
    if !sol.converged {
        return Ok((sol.winner, false));
    }
    let dominant = sol
        .i_out
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != sol.winner)
        .all(|(_, out)| sol.i_out[sol.winner] >= cfg.dominance_factor * *out);
    Ok((sol.winner, dominant))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use rand::Rng;

    /// Independent brute-force solve: eliminate the rail voltages with the
    /// rail equations and bisect the output-current constraint on V_c.
    fn bisection_oracle(iz: &[f64], cfg: &WtaConfig) -> (Vec<f64>, f64) {
        let p = &cfg.mosfet;
        let i_s = p.i_ref();
        let eta_vt = p.eta * p.v_t;
        let g = |v_c: f64| -> f64 {
            let u = i_s * exp_capped(v_c / eta_vt);
            let sum: f64 = iz
                .iter()
                .map(|z| {
                    let v_i = p.v_a * (z / u).ln();
                    i_s * exp_capped((v_i - v_c) / p.v_t)
                })
                .sum();
            sum - cfg.i_bias
        };
        let mut lo = eta_vt * (iz.iter().cloned().fold(f64::INFINITY, f64::min) / i_s).ln() - 1.0;
        let mut hi = lo + 2.0;
        while g(hi) > 0.0 {
            hi += 0.5;
        }
        while g(lo) < 0.0 {
            lo -= 0.5;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let v_c = 0.5 * (lo + hi);
        let u = i_s * exp_capped(v_c / eta_vt);
        (iz.iter().map(|z| p.v_a * (z / u).ln()).collect(), v_c)
    }

    fn no_feedback(m: usize) -> WtaConfig {
        WtaConfig {
            feedback_gain: 0.0,
            ..WtaConfig::new(m)
        }
    }

    #[test]
    fn equal_inputs_split_bias_symmetrically() {
        for m in [2, 4, 8] {
            let cfg = no_feedback(m);
            let iz = vec![150e-9; m];
            let sol = solve_static(&iz, &cfg).unwrap();
            assert!(sol.converged);
            for out in &sol.i_out {
                assert!((out - cfg.i_bias / m as f64).abs() / (cfg.i_bias / m as f64) < 1e-9);
            }
            let v0 = sol.v_rails[0];
            for v in &sol.v_rails {
                assert!((v - v0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn bias_conservation() {
        let cfg = WtaConfig::new(3);
        let sol = solve_static(&[100e-9, 101e-9, 50e-9], &cfg).unwrap();
        assert!(sol.converged);
        let total: f64 = sol.i_out.iter().sum();
        assert!((total - cfg.i_bias).abs() / cfg.i_bias < 1e-9);
    }

    #[test]
    fn one_percent_margin_example() {
        let cfg = WtaConfig::new(3);
        let sol = solve_static(&[100e-9, 101e-9, 50e-9], &cfg).unwrap();
        assert_eq!(sol.winner, 1);
        assert!((sol.margin - 0.01 / 1.01).abs() < 1e-6);
        let (winner, resolvable) = resolve_winner(&[100e-9, 101e-9, 50e-9], &cfg).unwrap();
        assert_eq!(winner, 1);
        assert!(resolvable);
    }

    #[test]
    fn matches_bisection_oracle() {
        let mut rng = stream_rng(17, 0);
        for trial in 0..50 {
            let m = [2usize, 3, 5, 8][trial % 4];
            let cfg = no_feedback(m);
            let iz: Vec<f64> = (0..m).map(|_| rng.gen_range(50e-9..600e-9)).collect();
            let sol = solve_static(&iz, &cfg).unwrap();
            assert!(sol.converged, "no convergence at {iz:?}");
            let (v_oracle, v_c_oracle) = bisection_oracle(&iz, &cfg);
            assert!(
                (sol.v_common - v_c_oracle).abs() < 1e-9,
                "v_c {} vs oracle {}",
                sol.v_common,
                v_c_oracle
            );
            for (a, b) in sol.v_rails.iter().zip(&v_oracle) {
                assert!((a - b).abs() < 1e-7, "rail {a} vs oracle {b}");
            }
        }
    }

    #[test]
    fn two_rail_output_ratio_matches_oracle() {
        let cfg = no_feedback(2);
        let c = 120e-9;
        let iz = [c, 2.0 * c];
        let sol = solve_static(&iz, &cfg).unwrap();
        let (v, v_c) = bisection_oracle(&iz, &cfg);
        let p = &cfg.mosfet;
        let oracle_ratio =
            exp_capped((v[1] - v_c) / p.v_t) / exp_capped((v[0] - v_c) / p.v_t);
        let ratio = sol.i_out[1] / sol.i_out[0];
        assert!((ratio - oracle_ratio).abs() / oracle_ratio < 1e-6);
        assert_eq!(sol.winner, 1);
    }

    #[test]
    fn equal_input_sensitivities_match_rail_count_formula() {
        // Winner slope ((M−1)/M)·V_A/I_z at equal inputs; the losers get
        // −(1/M)·V_A/I_z.
        for m in [2usize, 4, 8, 16] {
            let cfg = no_feedback(m);
            let iz = vec![150e-9; m];
            let sol = solve_static(&iz, &cfg).unwrap();
            let sens = small_signal_sensitivities(&sol, 0, &cfg).unwrap();
            let p = &cfg.mosfet;
            let expect_own = (m as f64 - 1.0) / m as f64 * p.v_a / iz[0];
            let expect_other = -p.v_a / (m as f64 * iz[0]);
            assert!((sens[0] - expect_own).abs() / expect_own < 2e-2);
            assert!((sens[1] - expect_other).abs() / expect_other.abs() < 2e-2);
        }
    }

    #[test]
    fn two_rail_slope_is_half_va_over_iz() {
        let cfg = no_feedback(2);
        let iz = vec![200e-9; 2];
        let sol = solve_static(&iz, &cfg).unwrap();
        let sens = small_signal_sensitivities(&sol, 0, &cfg).unwrap();
        let expect = cfg.mosfet.v_a / (2.0 * iz[0]);
        assert!((sens[0] - expect).abs() / expect < 2e-2);
    }

    #[test]
    fn dominant_winner_limits() {
        // Rail 0 strongly dominant: own slope → V_T/I_z, others → −V_A/I_z.
        let cfg = no_feedback(4);
        let iz = vec![200e-9, 150e-9, 150e-9, 150e-9];
        let sol = solve_static(&iz, &cfg).unwrap();
        let sens = small_signal_sensitivities(&sol, 0, &cfg).unwrap();
        let p = &cfg.mosfet;
        assert!((sens[0] - p.v_t / iz[0]).abs() / (p.v_t / iz[0]) < 5e-2);
        assert!((sens[1] + p.v_a / iz[0]).abs() / (p.v_a / iz[0]) < 5e-2);
    }

    #[test]
    fn finite_differences_confirm_equal_input_formula() {
        let cfg = no_feedback(4);
        let iz = vec![150e-9; 4];
        let check = verify_sensitivities(&iz, &cfg, 0, 1e-4).unwrap();
        assert!(
            check.max_rel_deviation < 5e-2,
            "deviation {}",
            check.max_rel_deviation
        );
    }

    #[test]
    fn finite_differences_confirm_dominant_winner() {
        let cfg = no_feedback(4);
        let iz = vec![200e-9, 150e-9, 150e-9, 150e-9];
        let check = verify_sensitivities(&iz, &cfg, 0, 1e-4).unwrap();
        assert!(
            check.max_rel_deviation < 5e-2,
            "deviation {}",
            check.max_rel_deviation
        );
    }

    #[test]
    fn winner_slope_ratio_between_rail_counts() {
        // ((M−1)/M) factor: M = 2 vs M = 8 gives (1/2)/(7/8) = 4/7.
        let slope = |m: usize| {
            let cfg = no_feedback(m);
            let iz = vec![150e-9; m];
            let sol = solve_static(&iz, &cfg).unwrap();
            small_signal_sensitivities(&sol, 0, &cfg).unwrap()[0]
        };
        let ratio = slope(2) / slope(8);
        assert!((ratio - 4.0 / 7.0).abs() / (4.0 / 7.0) < 2e-2);
    }

    #[test]
    fn exact_tie_breaks_to_lowest_index() {
        let cfg = WtaConfig::new(2);
        let c = 150e-9;
        let (winner, resolvable) = resolve_winner(&[c, c], &cfg).unwrap();
        assert_eq!(winner, 0);
        assert!(!resolvable);
    }

    #[test]
    fn margins_at_one_percent_resolve() {
        let mut rng = stream_rng(23, 0);
        for _ in 0..100 {
            let m = rng.gen_range(2..10usize);
            let cfg = WtaConfig::new(m);
            let scale = rng.gen_range(50e-9..400e-9);
            let mut iz: Vec<f64> = (0..m).map(|_| scale * rng.gen_range(0.3..0.95)).collect();
            let best = rng.gen_range(0..m);
            let max_other = iz
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != best)
                .map(|(_, v)| *v)
                .fold(0.0f64, f64::max);
            iz[best] = max_other * rng.gen_range(1.01..1.5);
            let (winner, resolvable) = resolve_winner(&iz, &cfg).unwrap();
            assert_eq!(winner, best, "iz = {iz:?}");
            assert!(resolvable, "iz = {iz:?}");
        }
    }

    #[test]
    fn permutation_equivariance() {
        let cfg = WtaConfig::new(4);
        let iz = [100e-9, 140e-9, 90e-9, 120e-9];
        let sol = solve_static(&iz, &cfg).unwrap();
        let perm = [2usize, 0, 3, 1];
        let iz_p: Vec<f64> = perm.iter().map(|&i| iz[i]).collect();
        let sol_p = solve_static(&iz_p, &cfg).unwrap();
        for (k, &src) in perm.iter().enumerate() {
            let dv = (sol_p.v_rails[k] - sol.v_rails[src]).abs();
            assert!(dv < 1e-7 * sol.v_rails[src].abs().max(1.0));
            // Deep losers underflow to zero output; compare on the bias scale.
            assert!((sol_p.i_out[k] - sol.i_out[src]).abs() < 1e-7 * cfg.i_bias);
        }
        assert_eq!(perm[sol_p.winner], sol.winner);
    }

    #[test]
    fn common_scale_leaves_winner_unchanged() {
        let cfg = WtaConfig::new(3);
        let iz = [100e-9, 130e-9, 90e-9];
        let a = solve_static(&iz, &cfg).unwrap();
        let iz4: Vec<f64> = iz.iter().map(|z| z * 4.0).collect();
        let b = solve_static(&iz4, &cfg).unwrap();
        assert_eq!(a.winner, b.winner);
        let ta: f64 = a.i_out.iter().sum();
        let tb: f64 = b.i_out.iter().sum();
        assert!((ta - tb).abs() / ta < 1e-9);
    }

    #[test]
    fn feedback_sharpens_the_winner() {
        let iz = [100e-9, 103e-9];
        let core = solve_static(&iz, &no_feedback(2)).unwrap();
        let fed = solve_static(&iz, &WtaConfig::new(2)).unwrap();
        let share = |s: &WtaSolution| s.i_out[1] / (s.i_out[0] + s.i_out[1]);
        assert!(share(&fed) >= share(&core));
        assert_eq!(fed.winner, 1);
    }

    #[test]
    fn rejects_bad_inputs() {
        let cfg = WtaConfig::new(2);
        assert!(matches!(
            solve_static(&[1e-9], &cfg),
            Err(Error::Shape(_))
        ));
        assert!(matches!(
            solve_static(&[1e-9, 0.0], &cfg),
            Err(Error::Domain(_))
        ));
    }
}
