//! Behavioral, equation-level simulator of an in-memory cosine-similarity
//! associative search engine.
//!
//! The search chain is modeled stage by stage: two resistor-clamped FeFET
//! memory arrays produce per-word dot-product and squared-norm currents
//! ([`array`]), a subthreshold translinear loop computes the squared-ratio
//! similarity current Iz = Ix²/Iy ([`translinear`]), and an analog
//! winner-take-all network selects the row with the largest similarity
//! ([`wta`]). On top of the chain sit a device-variation Monte Carlo
//! harness ([`variation`]), a calibrated energy/latency/area cost model
//! ([`cost`]), and an end-to-end hyperdimensional-computing classification
//! pipeline ([`hdc`]) that can route inference through exact software
//! oracles or the simulated hardware.
//!
//! Every capability has a runnable demonstration under `examples/`; the
//! `cosime` binary drives the same paths from a TOML configuration.
//!
//! ```
//! use cosime::array::{program, ArrayGeometry, BinaryVector};
//! use cosime::device::{CellParams, VariationSpec};
//! use cosime::rng::stream_rng;
//! use cosime::translinear::{row_similarities, TranslinearConfig};
//! use cosime::wta::{resolve_winner, WtaConfig};
//!
//! let stored = vec![
//!     "11010000".parse::<BinaryVector>().unwrap(),
//!     "01001100".parse::<BinaryVector>().unwrap(),
//! ];
//! let query = stored[0].clone();
//! let mut rng = stream_rng(0, 0);
//! let arr = program(
//!     stored,
//!     ArrayGeometry::new(2, 8),
//!     &CellParams::default(),
//!     &VariationSpec::zero(),
//!     &mut rng,
//! )
//! .unwrap();
//! let rc = arr.row_currents(&query).unwrap();
//! let sims = row_similarities(&rc.ix, &rc.iy, &TranslinearConfig::default()).unwrap();
//! let iz: Vec<f64> = sims.iter().map(|s| s.iz).collect();
//! let (winner, resolvable) = resolve_winner(&iz, &WtaConfig::new(2)).unwrap();
//! assert_eq!(winner, 0);
//! assert!(resolvable);
//! ```

pub mod array;
pub mod cli;
pub mod config;
pub mod cost;
pub mod device;
pub mod error;
pub mod hdc;
pub mod rng;
pub mod translinear;
pub mod variation;
pub mod wta;

pub use error::{Error, Result};
