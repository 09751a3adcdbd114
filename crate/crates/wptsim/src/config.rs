//! JSON run configuration.
//!
//! One config document feeds every CLI subcommand. Lengths carry their unit
//! in the key name (`_mm`, `_um`); the in-memory model is SI.

use serde::Deserialize;

use crate::analysis::SweepSpacing;
use crate::circuit::{CircuitParams, CompensationTopology};
use crate::coil::{SpiralCoil, COPPER_RESISTIVITY, DEFAULT_TRACE_THICKNESS};
use crate::design::DesignConstraints;
use crate::error::{Error, Result};
use crate::magnetics::GridSpec;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoilConfig {
    pub inner_diameter_mm: f64,
    pub outer_diameter_mm: f64,
    pub turns: u32,
    pub trace_width_mm: f64,
    pub spacing_mm: f64,
    /// Copper foil thickness; defaults to 35 um (1-oz foil).
    pub trace_thickness_um: Option<f64>,
    /// Defaults to copper.
    pub resistivity_ohm_m: Option<f64>,
}

impl CoilConfig {
    pub fn to_coil(&self, section: &str, issues: &mut Vec<String>) -> Option<SpiralCoil> {
        let coil = SpiralCoil::new(
            self.inner_diameter_mm * 1e-3,
            self.outer_diameter_mm * 1e-3,
            self.turns,
            self.trace_width_mm * 1e-3,
            self.spacing_mm * 1e-3,
            self.trace_thickness_um.map_or(DEFAULT_TRACE_THICKNESS, |t| t * 1e-6),
            self.resistivity_ohm_m.unwrap_or(COPPER_RESISTIVITY),
        );
        match coil {
            Ok(c) => Some(c),
            Err(e) => {
                issues.push(format!("{section}: {e}"));
                None
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitConfig {
    /// "SS" | "SP" | "PS" | "PP".
    pub topology: String,
    #[serde(rename = "c1_nF")]
    pub c1_nf: f64,
    #[serde(rename = "c2_nF")]
    pub c2_nf: f64,
    pub r1_ohm: f64,
    pub r2_ohm: f64,
    pub r_load_ohm: f64,
    pub vin_pp: f64,
    pub freq_hz: f64,
}

impl CircuitConfig {
    pub fn to_params(&self, issues: &mut Vec<String>) -> Option<CircuitParams> {
        let topology: CompensationTopology = match self.topology.parse() {
            Ok(t) => t,
            Err(e) => {
                issues.push(format!("circuit.topology: {e}"));
                return None;
            }
        };
        let params = CircuitParams {
            topology,
            c1: self.c1_nf * 1e-9,
            c2: self.c2_nf * 1e-9,
            r1: self.r1_ohm,
            r2: self.r2_ohm,
            r_load: self.r_load_ohm,
            source_peak_to_peak: self.vin_pp,
            frequency: self.freq_hz,
        };
        if let Err(e) = params.validate() {
            issues.push(format!("circuit: {e}"));
            return None;
        }
        Some(params)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignConfig {
    pub inner_diameter_mm: f64,
    pub trace_width_mm: f64,
    pub spacing_mm: f64,
    pub n_min: u32,
    pub n_max: u32,
    #[serde(rename = "target_uH")]
    pub target_uh: f64,
    pub tolerance: f64,
}

impl DesignConfig {
    pub fn to_constraints(&self) -> DesignConstraints {
        DesignConstraints {
            inner_diameter: self.inner_diameter_mm * 1e-3,
            trace_width: self.trace_width_mm * 1e-3,
            turn_spacing: self.spacing_mm * 1e-3,
            n_min: self.n_min,
            n_max: self.n_max,
            target: self.target_uh * 1e-6,
            tolerance: self.tolerance,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// "freq" | "gap".
    pub kind: String,
    pub f_start_hz: Option<f64>,
    pub f_stop_hz: Option<f64>,
    pub points: Option<usize>,
    /// "linear" (default) | "log".
    pub spacing: Option<String>,
    pub gaps_mm: Option<Vec<f64>>,
    /// Gap used to derive M for frequency sweeps.
    pub gap_mm: Option<f64>,
    /// Direct mutual-inductance override for frequency sweeps.
    #[serde(rename = "m_nH")]
    pub m_nh: Option<f64>,
    /// Filament subdivisions per turn for the coupling model (default 4).
    pub subdivisions: Option<u32>,
}

impl SweepConfig {
    pub fn spacing(&self, issues: &mut Vec<String>) -> SweepSpacing {
        match self.spacing.as_deref() {
            None | Some("linear") => SweepSpacing::Linear,
            Some("log") => SweepSpacing::Log,
            Some(other) => {
                issues.push(format!("sweep.spacing: unknown value {other:?}"));
                SweepSpacing::Linear
            }
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldMapConfig {
    pub x_min_mm: f64,
    pub x_max_mm: f64,
    pub nx: usize,
    pub z_min_mm: f64,
    pub z_max_mm: f64,
    pub nz: usize,
    #[serde(rename = "current_A")]
    pub current_a: f64,
    /// Segments per filament (default 360).
    pub segments: Option<usize>,
}

impl FieldMapConfig {
    pub fn to_grid(&self) -> GridSpec {
        GridSpec {
            x_min: self.x_min_mm * 1e-3,
            x_max: self.x_max_mm * 1e-3,
            nx: self.nx,
            z_min: self.z_min_mm * 1e-3,
            z_max: self.z_max_mm * 1e-3,
            nz: self.nz,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    #[serde(rename = "p_load_W")]
    pub p_load_w: f64,
    pub efficiency: f64,
}

/// Whole-run configuration; sections are optional and validated per
/// subcommand.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub tx_coil: Option<CoilConfig>,
    pub rx_coil: Option<CoilConfig>,
    pub circuit: Option<CircuitConfig>,
    pub design: Option<DesignConfig>,
    pub sweep: Option<SweepConfig>,
    pub field_map: Option<FieldMapConfig>,
    pub fit: Option<FitConfig>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))
    }

    pub fn require_tx(&self, issues: &mut Vec<String>) -> Option<SpiralCoil> {
        match &self.tx_coil {
            Some(c) => c.to_coil("tx_coil", issues),
            None => {
                issues.push("tx_coil: section missing".into());
                None
            }
        }
    }

    pub fn require_rx(&self, issues: &mut Vec<String>) -> Option<SpiralCoil> {
        match &self.rx_coil {
            Some(c) => c.to_coil("rx_coil", issues),
            None => {
                issues.push("rx_coil: section missing".into());
                None
            }
        }
    }

    pub fn require_circuit(&self, issues: &mut Vec<String>) -> Option<CircuitParams> {
        match &self.circuit {
            Some(c) => c.to_params(issues),
            None => {
                issues.push("circuit: section missing".into());
                None
            }
        }
    }
}
