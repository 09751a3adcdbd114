//! Inverse design: coil geometry from a target inductance, and capacitor
//! selection for a target resonant frequency.

use serde::Serialize;

use crate::circuit::resonant_capacitor;
use crate::coil::SpiralCoil;
use crate::error::{Error, Result};

/// Search space for the turn-count inversion: trace layout is fixed, the
/// outer diameter follows from the turn count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DesignConstraints {
    pub inner_diameter: f64,
    pub trace_width: f64,
    pub turn_spacing: f64,
    pub n_min: u32,
    pub n_max: u32,
    /// Target inductance, H.
    pub target: f64,
    /// Relative tolerance on the achieved inductance.
    pub tolerance: f64,
}

impl DesignConstraints {
    pub fn validate(&self) -> Result<()> {
        if self.n_min < 1 || self.n_max < self.n_min {
            return Err(Error::Precondition(format!(
                "need 1 <= n_min <= n_max, got [{}, {}]",
                self.n_min, self.n_max
            )));
        }
        if self.n_max - self.n_min >= 10_000 {
            return Err(Error::Precondition("turns range too large (> 1e4 candidates)".into()));
        }
        if !(self.target > 0.0 && self.tolerance > 0.0) {
            return Err(Error::Precondition("target and tolerance must be > 0".into()));
        }
        if !(self.inner_diameter > 0.0 && self.trace_width > 0.0 && self.turn_spacing >= 0.0) {
            return Err(Error::Precondition("invalid trace layout".into()));
        }
        Ok(())
    }

    fn candidate(&self, turns: u32) -> Result<SpiralCoil> {
        let d_out =
            self.inner_diameter + 2.0 * turns as f64 * (self.trace_width + self.turn_spacing);
        SpiralCoil::copper(
            self.inner_diameter,
            d_out,
            turns,
            self.trace_width,
            self.turn_spacing,
        )
    }
}

/// Exhaustive search over the integer turn range for the coil whose
/// inductance is closest to the target. Ties go to the fewer-turn candidate
/// (shorter trace, lower ESR). Errors with the closest achievable value when
/// the best candidate misses the tolerance.
pub fn design_coil_for_inductance(constraints: &DesignConstraints) -> Result<SpiralCoil> {
    constraints.validate()?;
    let mut best: Option<(SpiralCoil, f64)> = None;
    for turns in constraints.n_min..=constraints.n_max {
        let coil = constraints.candidate(turns)?;
        let miss = (coil.self_inductance() - constraints.target).abs();
        let better = match &best {
            Some((_, best_miss)) => miss < *best_miss,
            None => true,
        };
        if better {
            best = Some((coil, miss));
        }
    }
    let (coil, miss) = best.expect("non-empty turn range");
    if miss / constraints.target > constraints.tolerance {
        return Err(Error::UnreachableTarget {
            closest: coil.self_inductance(),
            turns: coil.turns,
        });
    }
    Ok(coil)
}

/// Compensation capacitors (C1, C2) in farads tuning both coils to `f0`.
pub fn design_resonant_pair(tx: &SpiralCoil, rx: &SpiralCoil, f0: f64) -> Result<(f64, f64)> {
    let c1 = resonant_capacitor(tx.self_inductance(), f0)?;
    let c2 = resonant_capacitor(rx.self_inductance(), f0)?;
    Ok((c1, c2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::resonant_frequency;
    use crate::coil::{table1_receiver, table1_transmitter};

    fn table1_constraints(target: f64) -> DesignConstraints {
        DesignConstraints {
            inner_diameter: 10e-3,
            trace_width: 0.8e-3,
            turn_spacing: 1.4e-3,
            n_min: 1,
            n_max: 20,
            target,
            tolerance: 0.01,
        }
    }

    #[test]
    fn recovers_table1_transmitter() {
        let coil = design_coil_for_inductance(&table1_constraints(1.589e-6)).unwrap();
        assert_eq!(coil.turns, 8);
        assert!((coil.outer_diameter - 45.2e-3).abs() < 1e-12);
        assert!(coil.is_geometry_consistent());
    }

    #[test]
    fn recovers_table1_receiver() {
        let coil = design_coil_for_inductance(&table1_constraints(0.802e-6)).unwrap();
        assert_eq!(coil.turns, 6);
        assert!((coil.outer_diameter - 36.4e-3).abs() < 1e-12);
    }

    #[test]
    fn unreachable_target_reports_closest() {
        let c = table1_constraints(1e-9); // far below L(1)
        match design_coil_for_inductance(&c) {
            Err(Error::UnreachableTarget { closest, turns }) => {
                assert_eq!(turns, 1);
                assert!(closest > 1e-9);
            }
            other => panic!("expected unreachable-target error, got {other:?}"),
        }
    }

    #[test]
    fn inversion_is_a_fixed_point() {
        for n in 1..=15u32 {
            let d_out = 10e-3 + 2.0 * n as f64 * (0.8e-3 + 1.4e-3);
            let coil = SpiralCoil::copper(10e-3, d_out, n, 0.8e-3, 1.4e-3).unwrap();
            let mut c = table1_constraints(coil.self_inductance());
            c.tolerance = 1e-9;
            let found = design_coil_for_inductance(&c).unwrap();
            assert_eq!(found.turns, n);
        }
    }

    #[test]
    fn invalid_constraints_rejected() {
        let mut c = table1_constraints(1e-6);
        c.n_min = 0;
        assert!(design_coil_for_inductance(&c).is_err());
        let mut c = table1_constraints(1e-6);
        c.n_max = 20_000;
        assert!(design_coil_for_inductance(&c).is_err());
    }

    #[test]
    fn resonant_pair_round_trips() {
        let tx = table1_transmitter();
        let rx = table1_receiver();
        let f0 = 2.976e6;
        let (c1, c2) = design_resonant_pair(&tx, &rx, f0).unwrap();
        assert!((c1 - 1.8e-9).abs() / 1.8e-9 < 1e-2, "C1 = {c1}");
        assert!(
            (resonant_frequency(tx.self_inductance(), c1).unwrap() - f0).abs() / f0 < 1e-12
        );
        assert!(
            (resonant_frequency(rx.self_inductance(), c2).unwrap() - f0).abs() / f0 < 1e-12
        );
        // halving f0 quadruples both capacitors
        let (c1h, c2h) = design_resonant_pair(&tx, &rx, 0.5 * f0).unwrap();
        assert!((c1h - 4.0 * c1).abs() / c1 < 1e-12);
        assert!((c2h - 4.0 * c2).abs() / c2 < 1e-12);
    }

    #[test]
    fn receiver_capacitor_near_table2() {
        // tuned at its own resonance 2.962 MHz the receiver wants ~3.6 nF
        let (_, c2) = design_resonant_pair(&table1_transmitter(), &table1_receiver(), 2.962e6).unwrap();
        assert!((c2 - 3.6e-9).abs() / 3.6e-9 < 1e-2, "C2 = {c2}");
    }
}
