//! Current-mode squarer-divider.
//!
//! A subthreshold translinear loop turns the gate-voltage sum rule around
//! its clockwise and counter-clockwise transistors into the current
//! relation Iz = Ix²/Iy. The stage is modeled functionally — the relation
//! is algebraically exact while the loop stays in weak inversion — and
//! [`certify_operating_region`] reports where that holds, checking the
//! loop voltage identity as an internal consistency tie to the circuit
//! derivation.

use serde::{Deserialize, Serialize};

use crate::device::{vgs_for_current, MosfetParams};
use crate::error::{Error, Result};

/// Translinear stage configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TranslinearConfig {
    /// Operating rail voltage (V). Default 0.6, keeping the loop in
    /// weak inversion.
    pub v0: f64,
    /// Loop transistor parameters.
    pub mosfet: MosfetParams,
    /// Gain of the associated current mirror; the output scales linearly
    /// with it (inputs ×ρ give Iz ×ρ). Default 1.
    pub mirror_ratio: f64,
    /// Lower bound of the certified Ix window (A). Default derived from
    /// the V_GS floor.
    pub ix_min: f64,
    /// Upper bound of the certified Ix window (A). Default derived from
    /// the weak-inversion ceiling `vth_mos`.
    pub ix_max: f64,
    /// V_GS floor above deep cutoff (V). Default 3·η·V_T.
    pub vgs_floor: f64,
    /// When true, out-of-window Ix is clamped to the window edge before
    /// squaring instead of extrapolating the ideal curve.
    pub soft_saturation: bool,
}

impl Default for TranslinearConfig {
    fn default() -> Self {
        Self::for_mosfet(MosfetParams::default())
    }
}

impl TranslinearConfig {
    /// Derive the certified current window from the device parameters:
    /// the window is the current range whose Eq.-5 gate voltage lies in
    /// `[vgs_floor, vth_mos)`.
    pub fn for_mosfet(mosfet: MosfetParams) -> Self {
        let vgs_floor = 3.0 * mosfet.eta * mosfet.v_t;
        let ix_min = mosfet.i_ref() * (vgs_floor / (mosfet.eta * mosfet.v_t)).exp();
        let ix_max = mosfet.i_ref() * (mosfet.vth_mos / (mosfet.eta * mosfet.v_t)).exp();
        Self {
            v0: 0.6,
            mosfet,
            mirror_ratio: 1.0,
            ix_min,
            ix_max,
            vgs_floor,
            soft_saturation: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.mosfet.validate()?;
        if self.v0 <= 0.0 {
            return Err(Error::Config("v0 must be positive".into()));
        }
        if !(self.ix_min < self.ix_max) {
            return Err(Error::Config("require ix_min < ix_max".into()));
        }
        if self.mirror_ratio <= 0.0 {
            return Err(Error::Config("mirror_ratio must be positive".into()));
        }
        Ok(())
    }
}

/// One squared-ratio output with its region flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityCurrent {
    /// Output current Iz (A).
    pub iz: f64,
    /// True iff the input pair keeps the whole loop inside the certified
    /// weak-inversion window.
    pub in_region: bool,
}

/// Per-transistor diagnostics of a loop certification.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegionReport {
    /// Gate voltages of the loop transistors, in loop order
    /// (CW: M1, M4 carrying Ix; CCW: M2, M5 carrying Iy and Iz).
    pub vgs: [f64; 4],
    /// |Σ_CW V_GS − Σ_CCW V_GS| (V); zero for the ideal output.
    pub loop_residual: f64,
    /// Per-transistor window flags, same order as `vgs`.
    pub transistor_in_region: [bool; 4],
    /// All transistors inside the window and the loop identity satisfied.
    pub in_region: bool,
}

/// Ideal squared ratio `Iz = mirror_ratio · Ix²/Iy` with a region flag.
/// The value is still computed out of region (or clamped when
/// `soft_saturation` is set); only `iy ≤ 0` is a hard domain error.
pub fn squared_ratio(ix: f64, iy: f64, cfg: &TranslinearConfig) -> Result<SimilarityCurrent> {
    if iy <= 0.0 {
        return Err(Error::Domain(format!(
            "translinear denominator must be positive, got {iy:e}"
        )));
    }
    if ix < 0.0 {
        return Err(Error::Domain(format!(
            "translinear numerator must be non-negative, got {ix:e}"
        )));
    }
    let in_window = ix >= cfg.ix_min && ix <= cfg.ix_max;
    let ix_eff = if cfg.soft_saturation {
        ix.clamp(cfg.ix_min, cfg.ix_max)
    } else {
        ix
    };
    Ok(SimilarityCurrent {
        iz: cfg.mirror_ratio * ix_eff * ix_eff / iy,
        in_region: in_window,
    })
}

/// Evaluate the loop gate voltages for drain currents {Ix, Ix, Iy, Iz},
/// check the voltage sum identity to 1e-9 V, and report whether every
/// transistor sits inside `[vgs_floor, vth_mos)`.
pub fn certify_operating_region(ix: f64, iy: f64, cfg: &TranslinearConfig) -> Result<RegionReport> {
    if ix <= 0.0 || iy <= 0.0 {
        return Err(Error::Domain(
            "region certification needs strictly positive currents".into(),
        ));
    }
    let iz = ix * ix / iy;
    let p = &cfg.mosfet;
    let vgs = [
        vgs_for_current(ix, p)?,
        vgs_for_current(ix, p)?,
        vgs_for_current(iy, p)?,
        vgs_for_current(iz, p)?,
    ];
    let loop_residual = ((vgs[0] + vgs[1]) - (vgs[2] + vgs[3])).abs();
    let transistor_in_region =
        vgs.map(|v| v >= cfg.vgs_floor && v < p.vth_mos);
    let in_region = transistor_in_region.iter().all(|f| *f) && loop_residual < 1e-9;
    Ok(RegionReport {
        vgs,
        loop_residual,
        transistor_in_region,
        in_region,
    })
}

/// Vectorized squared ratio over row current lists. The per-row flag
/// combines the Ix window check with the full loop certification.
pub fn row_similarities(
    ix: &[f64],
    iy: &[f64],
    cfg: &TranslinearConfig,
) -> Result<Vec<SimilarityCurrent>> {
    if ix.len() != iy.len() {
        return Err(Error::Shape(format!(
            "ix has {} rows, iy has {}",
            ix.len(),
            iy.len()
        )));
    }
    ix.iter()
        .zip(iy)
        .map(|(&x, &y)| {
            let mut out = squared_ratio(x, y, cfg)?;
            if out.in_region && x > 0.0 {
                out.in_region = certify_operating_region(x, y, cfg)?.in_region;
            } else if x == 0.0 {
                out.in_region = false;
            }
            Ok(out)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn direct_arithmetic() {
        let cfg = TranslinearConfig::default();
        let out = squared_ratio(300e-9, 600e-9, &cfg).unwrap();
        assert!((out.iz - 150e-9).abs() / 150e-9 < 1e-15);
        assert!(out.in_region);
    }

    #[test]
    fn identity_when_ix_equals_iy() {
        let cfg = TranslinearConfig::default();
        let out = squared_ratio(600e-9, 600e-9, &cfg).unwrap();
        assert!((out.iz - 600e-9).abs() / 600e-9 < 1e-15);
    }

    #[test]
    fn worst_case_pair_currents() {
        // Two rows with cos² = 1/4 and 1/5 at Iy tuned around 600 nA:
        // ix = 240 nA against iy = 480/600 nA gives iz = 120 and 96 nA,
        // i.e. 150/120 nA when normalized to iy = 600 nA per the cos² of
        // 1/4 and 1/5.
        let cfg = TranslinearConfig::default();
        let a = squared_ratio(300e-9, 600e-9, &cfg).unwrap().iz;
        let b = squared_ratio((600e-9_f64 * 600e-9 / 5.0).sqrt(), 600e-9, &cfg).unwrap().iz;
        assert!((a - 150e-9).abs() / 150e-9 < 1e-12);
        assert!((b - 120e-9).abs() / 120e-9 < 1e-12);
    }

    #[test]
    fn ratio_of_one_bit_denominators() {
        // ix = [2c, 2c], iy = [4c, 5c]: iz ratio (1/4)/(1/5) = 1.25.
        let cfg = TranslinearConfig::default();
        let c = 120e-9;
        let rows = row_similarities(&[2.0 * c, 2.0 * c], &[4.0 * c, 5.0 * c], &cfg).unwrap();
        assert!((rows[0].iz / rows[1].iz - 1.25).abs() < 1e-12);
    }

    #[test]
    fn domain_errors() {
        let cfg = TranslinearConfig::default();
        assert!(matches!(squared_ratio(1e-9, 0.0, &cfg), Err(Error::Domain(_))));
        assert!(matches!(squared_ratio(-1e-9, 1e-9, &cfg), Err(Error::Domain(_))));
    }

    #[test]
    fn out_of_window_is_flagged_value_still_computed() {
        let cfg = TranslinearConfig::default();
        let tiny = squared_ratio(cfg.ix_min / 10.0, 600e-9, &cfg).unwrap();
        assert!(!tiny.in_region);
        assert!(tiny.iz > 0.0);
        let big = squared_ratio(cfg.ix_max * 10.0, 600e-9, &cfg).unwrap();
        assert!(!big.in_region);
    }

    #[test]
    fn soft_saturation_clamps_at_window_edge() {
        let cfg = TranslinearConfig {
            soft_saturation: true,
            ..TranslinearConfig::default()
        };
        let at_edge = squared_ratio(cfg.ix_max, 600e-9, &cfg).unwrap().iz;
        let beyond = squared_ratio(cfg.ix_max * 4.0, 600e-9, &cfg).unwrap();
        assert_eq!(beyond.iz, at_edge);
        assert!(!beyond.in_region);
    }

    #[test]
    fn certification_at_operating_point() {
        let cfg = TranslinearConfig::default();
        let rep = certify_operating_region(600e-9, 600e-9, &cfg).unwrap();
        assert!(rep.in_region);
        assert!(rep.loop_residual < 1e-9);
        // Below the floor: out of region by log divergence.
        let rep = certify_operating_region(1e-12, 600e-9, &cfg).unwrap();
        assert!(!rep.in_region);
        // Above the weak-inversion ceiling.
        let rep = certify_operating_region(1e-3, 600e-9, &cfg).unwrap();
        assert!(!rep.in_region);
    }

    #[test]
    fn loop_identity_ties_output_to_circuit() {
        // 2·V_GS(ix) − V_GS(iy) − V_GS(iz) is exactly zero when
        // iz = ix²/iy; evaluated across random in-region pairs.
        let cfg = TranslinearConfig::default();
        let mut rng = stream_rng(13, 0);
        for _ in 0..200 {
            let ix = rng.gen_range(50e-9..5e-6);
            let iy = rng.gen_range(50e-9..5e-6);
            let rep = certify_operating_region(ix, iy, &cfg).unwrap();
            assert!(rep.loop_residual < 1e-9, "residual {}", rep.loop_residual);
        }
    }

    #[test]
    fn mirror_scaling_invariance() {
        // Cell current / N with mirror gain N reproduces Iz exactly.
        let cfg1 = TranslinearConfig::default();
        for n in [2.0, 4.0, 8.0] {
            let cfg_n = TranslinearConfig {
                mirror_ratio: n,
                ..TranslinearConfig::default()
            };
            let a = squared_ratio(240e-9, 480e-9, &cfg1).unwrap().iz;
            let b = squared_ratio(240e-9 / n, 480e-9 / n, &cfg_n).unwrap().iz;
            assert_eq!(a, b);
        }
    }

    proptest! {
        #[test]
        fn exactness_and_ordering(
            ix1 in 30e-9f64..5e-6,
            ix2 in 30e-9f64..5e-6,
            iy in 30e-9f64..5e-6,
        ) {
            let cfg = TranslinearConfig::default();
            let a = squared_ratio(ix1, iy, &cfg).unwrap();
            let b = squared_ratio(ix2, iy, &cfg).unwrap();
            prop_assert!((a.iz * iy - ix1 * ix1).abs() / (ix1 * ix1) < 1e-12);
            if ix1 > ix2 {
                prop_assert!(a.iz > b.iz);
            }
        }
    }
}
