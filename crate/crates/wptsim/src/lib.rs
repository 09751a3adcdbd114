//! Modeling toolkit for a resonant inductively-coupled wireless power link
//! built from printed spiral coils.
//!
//! - [`coil`]: spiral geometry to electrical parameters (L, ESR, filaments)
//! - [`magnetics`]: mutual inductance, coupling, Biot-Savart field sampling
//! - [`circuit`]: phasor solution of the compensated two-coil link
//! - [`analysis`]: frequency/gap sweeps and parameter fitting
//! - [`design`]: inverse coil design and resonant capacitor selection
//! - [`config`]: JSON run configuration shared by the CLI subcommands

pub mod analysis;
pub mod circuit;
pub mod coil;
pub mod config;
pub mod design;
pub mod error;
pub mod magnetics;

pub use error::{Error, Result};

/// Permeability of free space, H/m.
pub const MU_0: f64 = 4.0e-7 * std::f64::consts::PI;
