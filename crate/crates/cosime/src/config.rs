//! Hierarchical run configuration.
//!
//! Every section mirrors one module's parameter struct and every field is
//! optional in the file (defaults fill in). Unknown keys are rejected so
//! typos fail loudly. Each command writes its fully-resolved configuration
//! next to its outputs, and that file re-parses to an equivalent config.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::array::ArrayGeometry;
use crate::cost::CostParams;
use crate::device::{CellParams, MosfetParams, VariationSpec};
use crate::error::{Error, Result};
use crate::hdc::{Encoder, ErrorInjection};
use crate::translinear::TranslinearConfig;
use crate::variation::{default_sweep_bins, McPipeline};
use crate::wta::WtaConfig;

/// Device section: the MOSFET model shared by the analog stages and the
/// memory cell.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeviceSection {
    pub mosfet: MosfetParams,
    pub cell: CellParams,
}

/// Monte Carlo section.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McSection {
    pub trials: usize,
    /// "worst_case" or "similarity_sweep".
    pub scenario: String,
    /// Competitor cos bins of the sweep.
    pub bins: Vec<f64>,
    /// Word length of the constructed scenarios.
    pub dim: usize,
    /// Row-current tuning target (A).
    pub iy_target: f64,
    pub log_trials: bool,
}

impl Default for McSection {
    fn default() -> Self {
        Self {
            trials: 1000,
            scenario: "worst_case".into(),
            bins: default_sweep_bins(),
            dim: 1024,
            iy_target: 600e-9,
            log_trials: false,
        }
    }
}

/// Dataset reference of the HDC section.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetRef {
    /// Synthetic stand-in matching the ISOLET shape.
    IsoletLike { seed: u64 },
    /// Synthetic stand-in matching the UCIHAR shape.
    UciharLike { seed: u64 },
    /// Synthetic two-class stand-in matching the FACE shape.
    FaceLike { seed: u64 },
    /// Pre-split CSV pair.
    Csv { train: PathBuf, test: PathBuf },
}

impl Default for DatasetRef {
    fn default() -> Self {
        DatasetRef::IsoletLike { seed: 0 }
    }
}

/// HDC section.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HdcSection {
    pub encoder: Encoder,
    /// Hypervector dimensionalities to evaluate.
    pub dims: Vec<usize>,
    /// Backends: "cosine", "hamming", "simulated_am".
    pub backends: Vec<String>,
    pub dataset: DatasetRef,
    /// Row-current tuning target of the simulated AM (A).
    pub iy_target: f64,
    pub error_injection: Option<ErrorInjection>,
}

impl Default for HdcSection {
    fn default() -> Self {
        Self {
            encoder: Encoder::default(),
            dims: vec![256, 512, 1024],
            backends: vec!["cosine".into(), "hamming".into()],
            dataset: DatasetRef::default(),
            iy_target: 600e-9,
            error_injection: None,
        }
    }
}

/// The complete run configuration.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub master_seed: u64,
    pub output_dir: Option<PathBuf>,
    /// 0 = quiet, 1 = normal, 2 = rail-level detail in reports.
    pub verbosity: u8,
    pub device: DeviceSection,
    pub array: ArrayGeometry,
    pub translinear: TranslinearConfig,
    pub wta: WtaConfig,
    pub variation: VariationSpec,
    pub mc: McSection,
    pub cost: CostParams,
    pub hdc: HdcSection,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<RunConfig> {
        let cfg: RunConfig =
            toml::from_str(text).map_err(|e| Error::Config(format!("config file: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        self.device.mosfet.validate()?;
        self.device.cell.validate()?;
        self.array.validate()?;
        self.translinear.validate()?;
        self.wta.validate()?;
        self.variation.validate()?;
        self.cost.validate()?;
        if self.mc.trials == 0 {
            return Err(Error::Config("mc.trials must be >= 1".into()));
        }
        match self.mc.scenario.as_str() {
            "worst_case" | "similarity_sweep" => {}
            other => {
                return Err(Error::Config(format!(
                    "unknown mc.scenario '{other}' (expected worst_case or similarity_sweep)"
                )))
            }
        }
        for b in &self.hdc.backends {
            match b.as_str() {
                "cosine" | "hamming" | "simulated_am" => {}
                other => {
                    return Err(Error::Config(format!(
                        "unknown hdc backend '{other}' (expected cosine, hamming or simulated_am)"
                    )))
                }
            }
        }
        if self.hdc.dims.is_empty() {
            return Err(Error::Config("hdc.dims must not be empty".into()));
        }
        Ok(())
    }

    /// Analog pipeline bundle shared by the Monte Carlo and AM paths.
    pub fn pipeline(&self) -> McPipeline {
        McPipeline {
            cell: self.device.cell.clone(),
            translinear: self.translinear.clone(),
            wta: self.wta.clone(),
        }
    }

    /// Variation spec with the master seed folded in.
    pub fn seeded_variation(&self) -> VariationSpec {
        VariationSpec {
            rng_seed: self.master_seed,
            ..self.variation.clone()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_resolves_to_defaults() {
        let cfg = RunConfig::from_toml_str("").unwrap();
        assert_eq!(cfg.master_seed, 0);
        assert_eq!(cfg.mc.trials, 1000);
        assert_eq!(cfg.device.mosfet.eta, 1.5);
        assert_eq!(cfg.wta.mosfet.eta, 1.0);
    }

    #[test]
    fn resolved_config_round_trips() {
        let mut cfg = RunConfig::from_toml_str("master_seed = 9\n[mc]\ntrials = 44\n").unwrap();
        cfg.verbosity = 2;
        let text = cfg.to_toml();
        let back = RunConfig::from_toml_str(&text).unwrap();
        assert_eq!(back.master_seed, 9);
        assert_eq!(back.mc.trials, 44);
        assert_eq!(back.verbosity, 2);
        assert_eq!(back.to_toml(), text);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(
            RunConfig::from_toml_str("no_such_key = 1\n"),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            RunConfig::from_toml_str("[device.mosfet]\nnot_a_field = 2\n"),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn sections_override_defaults() {
        let cfg = RunConfig::from_toml_str(
            "[variation]\nsigma_r_rel = 0.02\n\n[wta]\ni_bias = 1e-6\n\n[hdc]\ndims = [128]\n",
        )
        .unwrap();
        assert_eq!(cfg.variation.sigma_r_rel, 0.02);
        assert_eq!(cfg.wta.i_bias, 1e-6);
        assert_eq!(cfg.hdc.dims, vec![128]);
        // Untouched sections keep their defaults.
        assert_eq!(cfg.variation.sigma_vth_low, 0.054);
    }

    #[test]
    fn bad_scenario_and_backend_rejected() {
        assert!(RunConfig::from_toml_str("[mc]\nscenario = \"typo\"\n").is_err());
        assert!(RunConfig::from_toml_str("[hdc]\nbackends = [\"euclid\"]\n").is_err());
    }
}
