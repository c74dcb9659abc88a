//! Analog device primitives: subthreshold MOSFET drain current, the binary
//! FeFET storage state, and the resistor-clamped 1FeFET1R cell ON current.
//!
//! The MOSFET model is the weak-inversion exponential with an optional
//! linear Early (output conductance) term. The 1FeFET1R cell reduces to a
//! clamped current source: the ON current is set by the series resistor,
//! which makes the stored threshold state a pure binary quantity and turns
//! resistor variability into the dominant per-cell current spread.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{positive_factor, trunc_normal, SimRng};

/// Subthreshold MOSFET parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MosfetParams {
    /// Reference drain current at V_GS = V_T (A). Default: 1 nA.
    pub i0: f64,
    /// Aspect ratio W/L. Default: 1.
    pub w_over_l: f64,
    /// Subthreshold slope factor η (≥ 1). Default: 1.5.
    pub eta: f64,
    /// Thermal voltage (V). Default: 25.8 mV (300 K).
    pub v_t: f64,
    /// Early voltage (V). `f64::INFINITY` disables the output-conductance
    /// term. Default: 20 V.
    pub v_a: f64,
    /// Upper V_GS bound of the weak-inversion model (V). Default: 0.45 V.
    pub vth_mos: f64,
}

impl Default for MosfetParams {
    fn default() -> Self {
        Self {
            i0: 1e-9,
            w_over_l: 1.0,
            eta: 1.5,
            v_t: 0.0258,
            v_a: 20.0,
            vth_mos: 0.45,
        }
    }
}

impl MosfetParams {
    /// Reference current I0·(W/L), the drain current at V_GS = 0, V_DS = 0.
    pub fn i_ref(&self) -> f64 {
        self.i0 * self.w_over_l
    }

    pub fn validate(&self) -> Result<()> {
        if self.i0 <= 0.0 || self.w_over_l <= 0.0 {
            return Err(Error::Config("i0 and w_over_l must be positive".into()));
        }
        if self.eta < 1.0 {
            return Err(Error::Config("eta must be >= 1".into()));
        }
        if self.v_t <= 0.0 || self.v_a <= 0.0 {
            return Err(Error::Config("v_t and v_a must be positive".into()));
        }
        if self.vth_mos <= 0.0 {
            return Err(Error::Config("vth_mos must be positive".into()));
        }
        Ok(())
    }
}

/// A drain-current evaluation together with its region flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrainCurrent {
    /// Drain current in amperes.
    pub amps: f64,
    /// False when V_GS has left the weak-inversion model range.
    pub in_subthreshold: bool,
}

/// Weak-inversion drain current:
/// `I = I0·(W/L)·exp(V_GS/(η·V_T))·(1 + V_DS/V_A)`.
///
/// The value is always computed; `in_subthreshold` flags V_GS at or above
/// `vth_mos` rather than aborting.
pub fn subthreshold_current(v_gs: f64, v_ds: f64, p: &MosfetParams) -> DrainCurrent {
    let early = if p.v_a.is_infinite() {
        1.0
    } else {
        1.0 + v_ds / p.v_a
    };
    DrainCurrent {
        amps: p.i_ref() * (v_gs / (p.eta * p.v_t)).exp() * early,
        in_subthreshold: v_gs < p.vth_mos,
    }
}

/// Gate voltage producing a given drain current at V_DS = 0:
/// `V_GS = η·V_T·ln(I_DS/(I0·(W/L)))`. Exact inverse of
/// [`subthreshold_current`] at zero drain bias.
pub fn vgs_for_current(i_ds: f64, p: &MosfetParams) -> Result<f64> {
    if i_ds <= 0.0 {
        return Err(Error::Domain(format!(
            "gate voltage undefined for non-positive current {i_ds:e}"
        )));
    }
    Ok(p.eta * p.v_t * (i_ds / p.i_ref()).ln())
}

/// 1FeFET1R cell parameters. The stored bit is the FeFET threshold state;
/// the series resistor clamps the ON current, so `i_on` is tied to
/// `r_series` by the 1/R rule.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CellParams {
    /// ON current of a conducting cell (A). Default tuned so a 1024-bit
    /// all-ones word sums to ≈ 600 nA.
    pub i_on: f64,
    /// Series clamp resistance (Ω). Tied to `i_on` by i_on ∝ 1/R.
    pub r_series: f64,
    /// OFF-state leakage (A). Default 0; nonzero enables leakage studies.
    pub i_off: f64,
    /// Low threshold state (stores 1), volts.
    pub vth_low: f64,
    /// High threshold state (stores 0), volts.
    pub vth_high: f64,
}

impl Default for CellParams {
    fn default() -> Self {
        let i_on = 600e-9 / 1024.0;
        Self {
            i_on,
            r_series: 0.6 / i_on,
            i_off: 0.0,
            vth_low: 0.3,
            vth_high: 1.5,
        }
    }
}

impl CellParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.i_on > self.i_off && self.i_off >= 0.0) {
            return Err(Error::Config("require i_on > i_off >= 0".into()));
        }
        if self.r_series <= 0.0 {
            return Err(Error::Config("r_series must be positive".into()));
        }
        if self.vth_low >= self.vth_high {
            return Err(Error::Config("require vth_low < vth_high".into()));
        }
        Ok(())
    }

    /// Memory window between the two threshold states (V).
    pub fn vth_window(&self) -> f64 {
        self.vth_high - self.vth_low
    }

    /// Cell with `i_on` divided by `scale` and `r_series` multiplied by it
    /// (the resistor-tuning rule: current scales as 1/R).
    pub fn scaled(&self, scale: f64) -> CellParams {
        CellParams {
            i_on: self.i_on / scale,
            r_series: self.r_series * scale,
            ..self.clone()
        }
    }
}

/// Statistical spreads of the device population.
///
/// The FeFET threshold spreads and the resistor/MOSFET/supply variabilities
/// carry their conventional defaults; how each source reaches the search
/// outcome is documented on [`VariationSpec::cell_current_sigma`] and
/// [`VariationSpec::mos_row_mismatch_sigma`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VariationSpec {
    /// σ of the low-V_TH state (V). Default 54 mV.
    pub sigma_vth_low: f64,
    /// σ of the high-V_TH state (V). Default 82 mV.
    pub sigma_vth_high: f64,
    /// Relative σ of the series resistor. Default 8%.
    pub sigma_r_rel: f64,
    /// Relative σ of MOSFET sizing (W/L). Default 10%.
    pub sigma_mos_size_rel: f64,
    /// Relative current-domain σ of MOSFET threshold variation. Default 10%.
    pub sigma_mos_vth_rel: f64,
    /// Relative σ of the supply voltage (common per trial). Default 10%.
    pub sigma_supply_rel: f64,
    /// Explicit per-cell ON-current spread; `None` derives it from
    /// `sigma_r_rel` and the attenuated FeFET contribution.
    pub sigma_cell_current_rel: Option<f64>,
    /// Attenuation k of the FeFET V_TH contribution to the cell current
    /// spread. 0 = fully clamped away by the series resistor (default),
    /// 1 = full contribution. Sensitivity knob.
    pub fefet_current_attenuation: f64,
    /// Fraction of the per-transistor MOSFET spread that lands as
    /// uncorrelated per-row mismatch at the translinear/WTA interface;
    /// the rest is treated as correlated within a row (loop ratios cancel)
    /// or common-mode. Fixed once by the calibration sweep
    /// (`examples/calibrate_variation.rs`).
    pub mos_mismatch_transfer: f64,
    /// Seed for all sampling driven by this spec.
    pub rng_seed: u64,
}

impl Default for VariationSpec {
    fn default() -> Self {
        Self {
            sigma_vth_low: 0.054,
            sigma_vth_high: 0.082,
            sigma_r_rel: 0.08,
            sigma_mos_size_rel: 0.10,
            sigma_mos_vth_rel: 0.10,
            sigma_supply_rel: 0.10,
            sigma_cell_current_rel: None,
            fefet_current_attenuation: 0.0,
            mos_mismatch_transfer: 0.15,
            rng_seed: 0,
        }
    }
}

impl VariationSpec {
    /// Spec with every spread zeroed: sampling reproduces nominals bit-exactly.
    pub fn zero() -> Self {
        Self {
            sigma_vth_low: 0.0,
            sigma_vth_high: 0.0,
            sigma_r_rel: 0.0,
            sigma_mos_size_rel: 0.0,
            sigma_mos_vth_rel: 0.0,
            sigma_supply_rel: 0.0,
            sigma_cell_current_rel: None,
            fefet_current_attenuation: 0.0,
            mos_mismatch_transfer: 0.0,
            rng_seed: 0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let sigmas = [
            self.sigma_vth_low,
            self.sigma_vth_high,
            self.sigma_r_rel,
            self.sigma_mos_size_rel,
            self.sigma_mos_vth_rel,
            self.sigma_supply_rel,
            self.sigma_cell_current_rel.unwrap_or(0.0),
            self.fefet_current_attenuation,
            self.mos_mismatch_transfer,
        ];
        if sigmas.iter().any(|s| *s < 0.0 || !s.is_finite()) {
            return Err(Error::Config("variation sigmas must be finite and >= 0".into()));
        }
        Ok(())
    }

    /// Total per-cell ON-current spread:
    /// `sqrt(sigma_r_rel² + k·f²)` with `f = sigma_vth_low / vth_window`,
    /// the stored-state threshold spread as a fraction of the memory
    /// window, and `k` the attenuation knob. With the default k = 0 the
    /// clamp suppresses the FeFET term and the spread equals `sigma_r_rel`.
    pub fn cell_current_sigma(&self, cell: &CellParams) -> f64 {
        if let Some(s) = self.sigma_cell_current_rel {
            return s;
        }
        let f = self.sigma_vth_low / cell.vth_window();
        (self.sigma_r_rel.powi(2) + self.fefet_current_attenuation * f * f).sqrt()
    }

    /// Residual spread applied on top of the 1/R recomputation when a cell
    /// is sampled (the FeFET-induced part only).
    fn residual_cell_sigma(&self, cell: &CellParams) -> f64 {
        if let Some(s) = self.sigma_cell_current_rel {
            let extra = s * s - self.sigma_r_rel * self.sigma_r_rel;
            return extra.max(0.0).sqrt();
        }
        let f = self.sigma_vth_low / cell.vth_window();
        (self.fefet_current_attenuation * f * f).sqrt()
    }

    /// Uncorrelated per-row mismatch σ of the translinear/WTA transistor
    /// chain: `mos_mismatch_transfer · sqrt(size² + vth²)`.
    pub fn mos_row_mismatch_sigma(&self) -> f64 {
        self.mos_mismatch_transfer
            * (self.sigma_mos_size_rel.powi(2) + self.sigma_mos_vth_rel.powi(2)).sqrt()
    }

    /// Per-trial supply multiplier, common to every cell of both arrays.
    pub fn sample_supply_factor(&self, rng: &mut SimRng) -> f64 {
        positive_factor(rng, self.sigma_supply_rel)
    }

    /// Per-row multiplicative mismatch of the analog chain past the array.
    pub fn sample_row_mismatch(&self, rng: &mut SimRng) -> f64 {
        positive_factor(rng, self.mos_row_mismatch_sigma())
    }
}

/// Sample one cell: the resistor moves by `(1 + N(0, σ_R))` (truncated at
/// ±4σ, resampled if non-positive), the ON current follows the 1/R clamp,
/// and the residual FeFET-induced spread multiplies on top. The threshold
/// states move by their own spreads; with a clamped cell they carry no
/// current effect, but they are reported for sensitivity studies.
pub fn sample_cell(nominal: &CellParams, spec: &VariationSpec, rng: &mut SimRng) -> CellParams {
    let r_factor = positive_factor(rng, spec.sigma_r_rel);
    let r_series = nominal.r_series * r_factor;
    let residual = positive_factor(rng, spec.residual_cell_sigma(nominal));
    CellParams {
        i_on: nominal.i_on / r_factor * residual,
        r_series,
        i_off: nominal.i_off,
        vth_low: nominal.vth_low + trunc_normal(rng, spec.sigma_vth_low),
        vth_high: nominal.vth_high + trunc_normal(rng, spec.sigma_vth_high),
    }
}
