//! Printed spiral coil geometry and its electrical parameters.
//!
//! A planar spiral is described by inner/outer diameter, turn count, trace
//! width and spacing. From that we derive the fill factor, average diameter,
//! self-inductance (current-sheet approximation for circular spirals),
//! conductor length, series resistance with a skin-depth clamp, and a
//! concentric circular-filament decomposition used by the field and
//! mutual-inductance solvers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::MU_0;

/// Copper resistivity at room temperature, ohm-m.
pub const COPPER_RESISTIVITY: f64 = 1.68e-8;

/// Standard 1-oz PCB copper foil thickness, m.
pub const DEFAULT_TRACE_THICKNESS: f64 = 35e-6;

/// Relative tolerance for the `d_out = d_in + 2 n (w + s)` consistency check.
pub const GEOMETRY_CONSISTENCY_TOL: f64 = 0.01;

/// Planar spiral coil. All lengths in meters, resistivity in ohm-m.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpiralCoil {
    pub inner_diameter: f64,
    pub outer_diameter: f64,
    pub turns: u32,
    pub trace_width: f64,
    pub turn_spacing: f64,
    pub trace_thickness: f64,
    pub resistivity: f64,
}

impl SpiralCoil {
    /// Build a coil, checking the type invariants.
    pub fn new(
        inner_diameter: f64,
        outer_diameter: f64,
        turns: u32,
        trace_width: f64,
        turn_spacing: f64,
        trace_thickness: f64,
        resistivity: f64,
    ) -> Result<Self> {
        if !(inner_diameter > 0.0) {
            return Err(Error::InvalidGeometry(format!(
                "inner_diameter must be > 0, got {inner_diameter}"
            )));
        }
        if !(outer_diameter > inner_diameter) {
            return Err(Error::InvalidGeometry(format!(
                "outer_diameter ({outer_diameter}) must exceed inner_diameter ({inner_diameter})"
            )));
        }
        if turns < 1 {
            return Err(Error::InvalidGeometry("turns must be >= 1".into()));
        }
        if !(trace_width > 0.0) {
            return Err(Error::InvalidGeometry("trace_width must be > 0".into()));
        }
        if !(turn_spacing >= 0.0) {
            return Err(Error::InvalidGeometry("turn_spacing must be >= 0".into()));
        }
        if !(trace_thickness > 0.0) {
            return Err(Error::InvalidGeometry("trace_thickness must be > 0".into()));
        }
        if !(resistivity > 0.0) {
            return Err(Error::InvalidGeometry("resistivity must be > 0".into()));
        }
        Ok(Self {
            inner_diameter,
            outer_diameter,
            turns,
            trace_width,
            turn_spacing,
            trace_thickness,
            resistivity,
        })
    }

    /// Coil with copper traces of standard 35 um foil thickness.
    pub fn copper(
        inner_diameter: f64,
        outer_diameter: f64,
        turns: u32,
        trace_width: f64,
        turn_spacing: f64,
    ) -> Result<Self> {
        Self::new(
            inner_diameter,
            outer_diameter,
            turns,
            trace_width,
            turn_spacing,
            DEFAULT_TRACE_THICKNESS,
            COPPER_RESISTIVITY,
        )
    }

    /// Relative deviation of `outer_diameter` from the value implied by
    /// `inner_diameter + 2 * turns * (width + spacing)`.
    pub fn geometry_consistency_error(&self) -> f64 {
        let implied = self.inner_diameter
            + 2.0 * self.turns as f64 * (self.trace_width + self.turn_spacing);
        (self.outer_diameter - implied).abs() / implied
    }

    /// Whether the spiral geometry is self-consistent to 1 %. A violation is
    /// advisory only; the inductance model needs just the diameters and turns.
    pub fn is_geometry_consistent(&self) -> bool {
        self.geometry_consistency_error() <= GEOMETRY_CONSISTENCY_TOL
    }

    /// Fill factor gamma = (d_out - d_in) / (d_out + d_in), in (0, 1).
    pub fn fill_factor(&self) -> f64 {
        (self.outer_diameter - self.inner_diameter) / (self.outer_diameter + self.inner_diameter)
    }

    /// Arithmetic mean of outer and inner diameters, m.
    pub fn average_diameter(&self) -> f64 {
        0.5 * (self.outer_diameter + self.inner_diameter)
    }

    /// Self-inductance in henries, current-sheet approximation for a circular
    /// planar spiral:
    ///
    /// ```text
    /// L = (mu0 n^2 d_avg / 2) * [ln(2.46 / gamma) + 0.20 gamma^2]
    /// ```
    pub fn self_inductance(&self) -> f64 {
        let gamma = self.fill_factor();
        let n = self.turns as f64;
        0.5 * MU_0 * n * n * self.average_diameter() * ((2.46 / gamma).ln() + 0.20 * gamma * gamma)
    }

    /// Total trace length, m: sum of per-turn filament circumferences.
    pub fn conductor_length(&self) -> f64 {
        self.to_filaments(1)
            .filaments
            .iter()
            .map(|f| 2.0 * std::f64::consts::PI * f.radius)
            .sum()
    }

    /// DC series resistance, ohm.
    pub fn dc_resistance(&self) -> f64 {
        self.resistivity * self.conductor_length() / (self.trace_width * self.trace_thickness)
    }

    /// Series resistance at `frequency` Hz with a one-dimensional skin-depth
    /// thickness clamp: the conducting thickness is min(t, delta) where
    /// delta = sqrt(rho / (pi f mu0)). Proximity effect is ignored.
    pub fn series_resistance(&self, frequency: f64) -> Result<f64> {
        if !(frequency >= 0.0) {
            return Err(Error::Domain(format!(
                "frequency must be >= 0, got {frequency}"
            )));
        }
        let thickness = if frequency > 0.0 {
            let skin_depth = (self.resistivity / (std::f64::consts::PI * frequency * MU_0)).sqrt();
            self.trace_thickness.min(skin_depth)
        } else {
            self.trace_thickness
        };
        Ok(self.resistivity * self.conductor_length() / (self.trace_width * thickness))
    }

    /// Decompose the spiral into concentric circular filaments, all in the
    /// z = 0 plane. Turn `i` spans radii `d_in/2 + i*(w+s)` to
    /// `d_in/2 + (i+1)*(w+s)` and contributes `subdivisions_per_turn`
    /// filaments centered in equal radial slices of that span; with one
    /// subdivision the filament sits at the turn-center radius.
    pub fn to_filaments(&self, subdivisions_per_turn: u32) -> FilamentSet {
        let subdivisions = subdivisions_per_turn.max(1);
        let pitch = self.trace_width + self.turn_spacing;
        let slice = pitch / subdivisions as f64;
        let mut filaments = Vec::with_capacity((self.turns * subdivisions) as usize);
        for turn in 0..self.turns {
            let turn_start = 0.5 * self.inner_diameter + turn as f64 * pitch;
            for sub in 0..subdivisions {
                filaments.push(Filament {
                    radius: turn_start + (sub as f64 + 0.5) * slice,
                    axial_position: 0.0,
                });
            }
        }
        FilamentSet {
            filaments,
            subdivisions_per_turn: subdivisions,
        }
    }
}

/// One circular current filament, coaxial with the z axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Filament {
    /// Loop radius, m.
    pub radius: f64,
    /// Height of the loop plane, m.
    pub axial_position: f64,
}

/// Concentric circular filaments approximating a spiral, identical current in
/// each filament. Radii are strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct FilamentSet {
    pub filaments: Vec<Filament>,
    pub subdivisions_per_turn: u32,
}

impl FilamentSet {
    /// Same filaments shifted to the plane z = `offset`.
    pub fn with_axial_offset(&self, offset: f64) -> FilamentSet {
        FilamentSet {
            filaments: self
                .filaments
                .iter()
                .map(|f| Filament {
                    radius: f.radius,
                    axial_position: f.axial_position + offset,
                })
                .collect(),
            subdivisions_per_turn: self.subdivisions_per_turn,
        }
    }

    pub fn len(&self) -> usize {
        self.filaments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.filaments.is_empty()
    }
}

/// The Table 1 transmitter: d_in 10 mm, d_out 45.2 mm, 8 turns, 0.8 mm trace,
/// 1.4 mm spacing.
pub fn table1_transmitter() -> SpiralCoil {
    SpiralCoil::copper(10e-3, 45.2e-3, 8, 0.8e-3, 1.4e-3).expect("valid reference geometry")
}

/// The Table 1 receiver: d_in 10 mm, d_out 36.4 mm, 6 turns, 0.8 mm trace,
/// 1.4 mm spacing.
pub fn table1_receiver() -> SpiralCoil {
    SpiralCoil::copper(10e-3, 36.4e-3, 6, 0.8e-3, 1.4e-3).expect("valid reference geometry")
}
