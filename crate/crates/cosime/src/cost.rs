//! Parametric energy/latency/area model.
//!
//! This is a declared lookup-and-scale model, not a physics model: the
//! calibrated per-bit energy, search latency and reference area enter as
//! parameters, and the model provides consistent scaling (energy linear in
//! rows, flat in wordlength under current tuning; latency flat; area
//! linear in cell count) plus ratio arithmetic against a bundled table of
//! published associative-memory designs.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::array::ArrayGeometry;
use crate::error::{Error, Result};

/// Calibrated cost parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CostParams {
    /// Search energy per bit (J). Default 0.286 fJ.
    pub energy_per_bit: f64,
    /// Search latency (s), independent of geometry. Default 3 ns.
    pub latency: f64,
    /// Area of the reference 256×256 array (m²). Default 0.0198 mm².
    pub area_ref: f64,
    /// Cell count the reference area corresponds to.
    pub area_cells_ref: f64,
    /// WTA share of the search energy. Default 0.56.
    pub wta_energy_share: f64,
    /// Translinear share of the search energy. Default 0.43.
    pub translinear_energy_share: f64,
    /// Row count of the energy calibration point.
    pub rows_ref: f64,
    /// Wordlength of the energy calibration point.
    pub dim_ref: f64,
}

impl Default for CostParams {
    fn default() -> Self {
        Self {
            energy_per_bit: 0.286e-15,
            latency: 3e-9,
            area_ref: 0.0198e-6,
            area_cells_ref: 256.0 * 256.0,
            wta_energy_share: 0.56,
            translinear_energy_share: 0.43,
            rows_ref: 256.0,
            dim_ref: 1024.0,
        }
    }
}

impl CostParams {
    pub fn validate(&self) -> Result<()> {
        if self.energy_per_bit <= 0.0 || self.latency <= 0.0 || self.area_ref <= 0.0 {
            return Err(Error::Config("cost parameters must be positive".into()));
        }
        if self.wta_energy_share < 0.0
            || self.translinear_energy_share < 0.0
            || self.wta_energy_share + self.translinear_energy_share > 1.0
        {
            return Err(Error::Config(
                "energy shares must be non-negative and sum to at most 1".into(),
            ));
        }
        Ok(())
    }
}

/// Cost estimate for one geometry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CostReport {
    pub rows: usize,
    pub dim: usize,
    /// Total search energy (J).
    pub energy: f64,
    /// Search latency (s).
    pub latency: f64,
    /// Array area (m²).
    pub area: f64,
    /// Energy by component (J): wta, translinear, other.
    pub energy_breakdown: BTreeMap<String, f64>,
    /// Per-bit energy (fJ) and latency (ns) on the baseline-table scale.
    pub energy_fj_per_bit: f64,
    pub latency_ns: f64,
    pub area_mm2_at_ref_cells: f64,
}

/// Estimate search cost: energy is linear in rows and flat in wordlength
/// (the per-row current is held constant by resistor tuning), latency is
/// constant, area is linear in cell count.
pub fn estimate(geometry: &ArrayGeometry, p: &CostParams) -> Result<CostReport> {
    geometry.validate()?;
    p.validate()?;
    let energy = p.energy_per_bit * p.dim_ref * geometry.rows as f64;
    let wta = p.wta_energy_share * energy;
    let translinear = p.translinear_energy_share * energy;
    let other = energy - wta - translinear;
    let mut energy_breakdown = BTreeMap::new();
    energy_breakdown.insert("wta".to_string(), wta);
    energy_breakdown.insert("translinear".to_string(), translinear);
    energy_breakdown.insert("other".to_string(), other);
    Ok(CostReport {
        rows: geometry.rows,
        dim: geometry.dim,
        energy,
        latency: p.latency,
        area: p.area_ref * (geometry.rows * geometry.dim) as f64 / p.area_cells_ref,
        energy_breakdown,
        energy_fj_per_bit: p.energy_per_bit * 1e15,
        latency_ns: p.latency * 1e9,
        area_mm2_at_ref_cells: p.area_ref * 1e6,
    })
}

/// One row of the bundled comparison table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BaselineEntry {
    pub name: String,
    pub technology: String,
    pub metric: String,
    #[serde(rename = "energy_fJ_per_bit")]
    pub energy_fj_per_bit: f64,
    pub latency_ns: f64,
    pub area_mm2: f64,
    pub process_nm: String,
}

/// The comparison table.
#[derive(Debug, Clone)]
pub struct Baselines {
    pub entries: Vec<BaselineEntry>,
}

const BUNDLED_BASELINES: &str = include_str!("../data/baselines.csv");

impl Baselines {
    /// The table shipped with the crate.
    pub fn bundled() -> Self {
        Self::from_reader(BUNDLED_BASELINES.as_bytes())
            .expect("bundled baseline table must parse")
    }

    pub fn from_csv_path(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::from_reader(file)
    }

    fn from_reader<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(reader);
        let mut entries = Vec::new();
        for (i, record) in rdr.deserialize::<BaselineEntry>().enumerate() {
            entries.push(record.map_err(|e| Error::Parse {
                line: i + 2,
                msg: e.to_string(),
            })?);
        }
        if entries.is_empty() {
            return Err(Error::Shape("baseline table is empty".into()));
        }
        Ok(Self { entries })
    }

    pub fn get(&self, name: &str) -> Result<&BaselineEntry> {
        self.entries
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| Error::MissingBaseline(name.to_string()))
    }
}

/// Per-baseline cost ratios relative to this design.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BaselineRatio {
    pub name: String,
    pub metric: String,
    /// baseline energy per bit / this design's energy per bit
    pub energy_ratio: f64,
    pub latency_ratio: f64,
    pub area_ratio: f64,
}

/// Compute the ratio table: each baseline's per-bit energy, latency and
/// reference-array area divided by this design's values.
pub fn compare_to_baselines(report: &CostReport, baselines: &Baselines) -> Vec<BaselineRatio> {
    baselines
        .entries
        .iter()
        .map(|b| BaselineRatio {
            name: b.name.clone(),
            metric: b.metric.clone(),
            energy_ratio: b.energy_fj_per_bit / report.energy_fj_per_bit,
            latency_ratio: b.latency_ns / report.latency_ns,
            area_ratio: b.area_mm2 / report.area_mm2_at_ref_cells,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_report() -> CostReport {
        let geo = ArrayGeometry::new(256, 1024);
        estimate(&geo, &CostParams::default()).unwrap()
    }

    #[test]
    fn reference_geometry_is_calibration_fixed_point() {
        let r = reference_report();
        // 0.286 fJ × 256 × 1024 ≈ 74.97 pJ at 3 ns.
        assert!((r.energy - 0.286e-15 * 256.0 * 1024.0).abs() / r.energy < 1e-12);
        assert!((r.energy - 74.97e-12).abs() / r.energy < 1e-3);
        assert_eq!(r.latency, 3e-9);
        assert!((r.area - 0.0198e-6 * 4.0).abs() / r.area < 1e-12);
    }

    #[test]
    fn energy_linear_in_rows_flat_in_dims() {
        let p = CostParams::default();
        let base = estimate(&ArrayGeometry::new(256, 1024), &p).unwrap();
        let doubled = estimate(&ArrayGeometry::new(512, 1024), &p).unwrap();
        assert!((doubled.energy - 2.0 * base.energy).abs() / base.energy < 1e-12);
        assert_eq!(doubled.latency, base.latency);
        for dim in [64, 128, 512, 1024] {
            let r = estimate(&ArrayGeometry::new(256, dim), &p).unwrap();
            assert_eq!(r.energy, base.energy);
            assert_eq!(r.latency, base.latency);
        }
    }

    #[test]
    fn breakdown_closes_with_configured_shares() {
        let r = reference_report();
        let wta = r.energy_breakdown["wta"];
        let tl = r.energy_breakdown["translinear"];
        let other = r.energy_breakdown["other"];
        assert!((wta / r.energy - 0.56).abs() < 1e-12);
        assert!((tl / r.energy - 0.43).abs() < 1e-12);
        assert!(other >= 0.0);
        assert!((wta + tl + other - r.energy).abs() / r.energy < 1e-12);
    }

    #[test]
    fn bundled_table_reproduces_published_ratios() {
        let ratios = compare_to_baselines(&reference_report(), &Baselines::bundled());
        let find = |name: &str| ratios.iter().find(|r| r.name == name).unwrap();
        let approx = find("Approx. Cosine");
        assert!((approx.energy_ratio - 90.5).abs() / 90.5 < 5e-3);
        assert!((approx.latency_ratio - 333.0).abs() / 333.0 < 1e-2);
        let tcam = find("FeFET TCAM");
        assert!((tcam.latency_ratio - 0.12).abs() < 1e-9);
        let this_work = find("COSIME");
        assert!((this_work.energy_ratio - 1.0).abs() < 1e-12);
        assert!((this_work.latency_ratio - 1.0).abs() < 1e-12);
        assert!((this_work.area_ratio - 1.0).abs() < 1e-12);
    }

    #[test]
    fn missing_baseline_is_a_lookup_error() {
        let b = Baselines::bundled();
        assert!(matches!(b.get("DRAM"), Err(Error::MissingBaseline(_))));
        assert!(b.get("A-HAM").is_ok());
    }

    #[test]
    fn homogeneity_in_rows() {
        let p = CostParams::default();
        let base = estimate(&ArrayGeometry::new(16, 256), &p).unwrap();
        for k in [2usize, 3, 10] {
            let scaled = estimate(&ArrayGeometry::new(16 * k, 256), &p).unwrap();
            assert!((scaled.energy - k as f64 * base.energy).abs() / base.energy < 1e-12);
        }
    }
}
