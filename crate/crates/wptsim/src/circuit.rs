//! Phasor-domain model of the compensated two-coil resonant link.
//!
//! The coupled pair is a two-mesh complex linear system. Compensation
//! capacitors sit in series or parallel with each coil (SS/SP/PS/PP); the
//! secondary drives a resistive load. Phasors are peak-valued, so powers
//! carry a factor 1/2.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::magnetics::CouplingLink;

/// Capacitor placement on (primary, secondary): S = series, P = parallel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CompensationTopology {
    #[serde(rename = "SS")]
    SeriesSeries,
    #[serde(rename = "SP")]
    SeriesParallel,
    #[serde(rename = "PS")]
    ParallelSeries,
    #[serde(rename = "PP")]
    ParallelParallel,
}

impl CompensationTopology {
    pub const ALL: [CompensationTopology; 4] = [
        CompensationTopology::SeriesSeries,
        CompensationTopology::SeriesParallel,
        CompensationTopology::ParallelSeries,
        CompensationTopology::ParallelParallel,
    ];

    fn primary_series(self) -> bool {
        matches!(
            self,
            CompensationTopology::SeriesSeries | CompensationTopology::SeriesParallel
        )
    }

    fn secondary_series(self) -> bool {
        matches!(
            self,
            CompensationTopology::SeriesSeries | CompensationTopology::ParallelSeries
        )
    }
}

impl fmt::Display for CompensationTopology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            CompensationTopology::SeriesSeries => "SS",
            CompensationTopology::SeriesParallel => "SP",
            CompensationTopology::ParallelSeries => "PS",
            CompensationTopology::ParallelParallel => "PP",
        };
        f.write_str(s)
    }
}

impl FromStr for CompensationTopology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "SS" => Ok(CompensationTopology::SeriesSeries),
            "SP" => Ok(CompensationTopology::SeriesParallel),
            "PS" => Ok(CompensationTopology::ParallelSeries),
            "PP" => Ok(CompensationTopology::ParallelParallel),
            other => Err(Error::Domain(format!(
                "unknown topology {other:?}, expected SS, SP, PS or PP"
            ))),
        }
    }
}

/// Drive and component values for the compensated link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircuitParams {
    pub topology: CompensationTopology,
    /// Primary compensation capacitor, F.
    pub c1: f64,
    /// Secondary compensation capacitor, F.
    pub c2: f64,
    /// Primary coil ESR, ohm.
    pub r1: f64,
    /// Secondary coil ESR, ohm.
    pub r2: f64,
    /// Load resistance, ohm.
    pub r_load: f64,
    /// Source amplitude, volts peak-to-peak.
    pub source_peak_to_peak: f64,
    /// Drive frequency, Hz.
    pub frequency: f64,
}

impl CircuitParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.c1 > 0.0 && self.c2 > 0.0) {
            return Err(Error::Domain("capacitances must be > 0".into()));
        }
        if !(self.r1 >= 0.0 && self.r2 >= 0.0) {
            return Err(Error::Domain("ESRs must be >= 0".into()));
        }
        if !(self.r_load > 0.0) {
            return Err(Error::Domain("load resistance must be > 0".into()));
        }
        if !(self.frequency > 0.0) {
            return Err(Error::Domain("frequency must be > 0".into()));
        }
        if !(self.source_peak_to_peak > 0.0) {
            return Err(Error::Domain("source amplitude must be > 0".into()));
        }
        Ok(())
    }

    /// Source amplitude as a peak phasor reference, V.
    pub fn source_peak(&self) -> f64 {
        0.5 * self.source_peak_to_peak
    }
}

/// Steady-state solution at one frequency. Currents and voltages are peak
/// phasors; powers are time-averaged watts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhasorSolution {
    /// Primary coil current, A peak.
    pub i1: Complex64,
    /// Secondary coil current, A peak.
    pub i2: Complex64,
    /// Current drawn from the source (differs from `i1` for parallel-primary
    /// topologies, where the compensation capacitor hangs across the source).
    pub i_source: Complex64,
    /// Voltage across the load, V peak.
    pub v_out: Complex64,
    /// Active input power, W.
    pub p_in: f64,
    /// Power dissipated in the load, W.
    pub p_load: f64,
    /// Power dissipated in the two ESRs, W.
    pub p_loss: f64,
    /// P_load / P_in (0 when no power is drawn).
    pub efficiency: f64,
}

/// f0 = 1 / (2 pi sqrt(L C)).
pub fn resonant_frequency(inductance: f64, capacitance: f64) -> Result<f64> {
    if !(inductance > 0.0 && capacitance > 0.0) {
        return Err(Error::Domain(format!(
            "L and C must be > 0, got ({inductance}, {capacitance})"
        )));
    }
    Ok(1.0 / (2.0 * PI * (inductance * capacitance).sqrt()))
}

/// C = 1 / ((2 pi f0)^2 L); inverse of [`resonant_frequency`].
pub fn resonant_capacitor(inductance: f64, f0: f64) -> Result<f64> {
    if !(inductance > 0.0 && f0 > 0.0) {
        return Err(Error::Domain(format!(
            "L and f0 must be > 0, got ({inductance}, {f0})"
        )));
    }
    Ok(1.0 / ((2.0 * PI * f0).powi(2) * inductance))
}

/// Solve the two-mesh system at `params.frequency`.
///
/// With Z1 the primary coil branch (ESR + coil, plus the capacitor when in
/// series) and Z2 the secondary branch terminated by the load network:
///
/// ```text
/// Z1 I1 + j w M I2 = Vs
/// j w M I1 + Z2 I2 = 0
/// ```
///
/// For parallel-compensated sides the capacitor moves out of the mesh: across
/// the source on the primary, across the load on the secondary.
pub fn solve_phasor(params: &CircuitParams, link: &CouplingLink) -> Result<PhasorSolution> {
    params.validate()?;
    let w = 2.0 * PI * params.frequency;
    let jw = Complex64::new(0.0, w);
    let vs = Complex64::new(params.source_peak(), 0.0);
    let zc1 = 1.0 / (jw * params.c1);
    let zc2 = 1.0 / (jw * params.c2);

    let z1 = if params.topology.primary_series() {
        params.r1 + jw * link.l1 + zc1
    } else {
        params.r1 + jw * link.l1
    };
    // secondary termination seen by the mesh, and the transfer from mesh
    // current to load voltage
    let (z_term, v_out_of_i2): (Complex64, Box<dyn Fn(Complex64) -> Complex64>) =
        if params.topology.secondary_series() {
            let rl = params.r_load;
            (zc2 + rl, Box::new(move |i2: Complex64| -i2 * rl))
        } else {
            let zp = params.r_load * zc2 / (params.r_load + zc2);
            (zp, Box::new(move |i2: Complex64| -i2 * zp))
        };
    let z2 = params.r2 + jw * link.l2 + z_term;

    let zm = jw * link.m;
    let det = z1 * z2 - zm * zm;
    if det.norm() == 0.0 {
        return Err(Error::SingularSystem {
            frequency: params.frequency,
        });
    }
    let i1 = vs * z2 / det;
    let i2 = -vs * zm / det;
    let v_out = v_out_of_i2(i2);

    let i_source = if params.topology.primary_series() {
        i1
    } else {
        i1 + vs / zc1
    };

    let p_in = 0.5 * (vs * i_source.conj()).re;
    let p_load = 0.5 * v_out.norm_sqr() / params.r_load;
    let p_loss = 0.5 * (i1.norm_sqr() * params.r1 + i2.norm_sqr() * params.r2);
    let efficiency = if p_in > 0.0 { p_load / p_in } else { 0.0 };

    Ok(PhasorSolution {
        i1,
        i2,
        i_source,
        v_out,
        p_in,
        p_load,
        p_loss,
        efficiency,
    })
}

/// |V_out / V_in| at frequency `f`.
pub fn transfer_function(params: &CircuitParams, link: &CouplingLink, f: f64) -> Result<f64> {
    let p = CircuitParams { frequency: f, ..*params };
    let sol = solve_phasor(&p, link)?;
    Ok(sol.v_out.norm() / p.source_peak())
}

/// Input impedance Z_in = V_s / I_source at frequency `f`, including the
/// reflected secondary impedance.
pub fn input_impedance(params: &CircuitParams, link: &CouplingLink, f: f64) -> Result<Complex64> {
    let p = CircuitParams { frequency: f, ..*params };
    let sol = solve_phasor(&p, link)?;
    if sol.i_source.norm() == 0.0 {
        return Err(Error::UndefinedImpedance);
    }
    Ok(Complex64::new(p.source_peak(), 0.0) / sol.i_source)
}

/// Table 2 component values on the paper's series-parallel circuit:
/// Cs = 1.8 nF, Cp = 3.6 nF, R_L = 10 ohm, 19.6 V p-p drive.
pub fn table2_params(r1: f64, r2: f64, frequency: f64) -> CircuitParams {
    CircuitParams {
        topology: CompensationTopology::SeriesParallel,
        c1: 1.8e-9,
        c2: 3.6e-9,
        r1,
        r2,
        r_load: 10.0,
        source_peak_to_peak: 19.6,
        frequency,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel_err(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn link(m: f64) -> CouplingLink {
        CouplingLink::new(1.589e-6, 0.802e-6, m).unwrap()
    }

    #[test]
    fn resonant_frequency_table2() {
        let f_t = resonant_frequency(1.589e-6, 1.8e-9).unwrap();
        let f_r = resonant_frequency(0.802e-6, 3.6e-9).unwrap();
        assert!(rel_err(f_t, 2.976e6) < 1e-3, "f_t = {f_t}");
        assert!(rel_err(f_r, 2.962e6) < 1e-3, "f_r = {f_r}");
        // quadrupling C halves f0
        let f_q = resonant_frequency(1.589e-6, 4.0 * 1.8e-9).unwrap();
        assert!(rel_err(f_q, 0.5 * f_t) < 1e-12);
        assert!(resonant_frequency(0.0, 1e-9).is_err());
    }

    #[test]
    fn resonant_capacitor_round_trip() {
        for (l, c) in [(1.589e-6, 1.8e-9), (0.802e-6, 3.6e-9), (4.7e-6, 220e-12)] {
            let f0 = resonant_frequency(l, c).unwrap();
            let c_back = resonant_capacitor(l, f0).unwrap();
            assert!(rel_err(c_back, c) < 1e-12);
        }
        assert!(rel_err(resonant_capacitor(1.589e-6, 2.976e6).unwrap(), 1.8e-9) < 1e-2);
        assert!(resonant_capacitor(1e-6, -1.0).is_err());
    }

    #[test]
    fn no_coupling_no_transfer() {
        for topo in CompensationTopology::ALL {
            let p = CircuitParams { topology: topo, ..table2_params(0.5, 0.5, 2.976e6) };
            let sol = solve_phasor(&p, &link(0.0)).unwrap();
            assert_eq!(sol.i2.norm(), 0.0);
            assert_eq!(sol.v_out.norm(), 0.0);
            assert_eq!(sol.efficiency, 0.0);
        }
    }

    #[test]
    fn energy_balance() {
        for topo in CompensationTopology::ALL {
            let p = CircuitParams { topology: topo, ..table2_params(0.7, 0.3, 3.1e6) };
            let sol = solve_phasor(&p, &link(150e-9)).unwrap();
            let residual = (sol.p_in - sol.p_load - sol.p_loss).abs() / sol.p_in;
            assert!(residual < 1e-9, "{topo}: residual {residual}");
            assert!(sol.efficiency > 0.0 && sol.efficiency < 1.0);
        }
    }

    #[test]
    fn lossless_link_is_perfectly_efficient() {
        for topo in CompensationTopology::ALL {
            let p = CircuitParams { topology: topo, ..table2_params(0.0, 0.0, 2.976e6) };
            let sol = solve_phasor(&p, &link(200e-9)).unwrap();
            assert!((sol.efficiency - 1.0).abs() < 1e-9, "{topo}: {}", sol.efficiency);
        }
    }

    #[test]
    fn linear_in_source_amplitude() {
        let p = table2_params(0.5, 0.5, 2.976e6);
        let doubled = CircuitParams { source_peak_to_peak: 2.0 * p.source_peak_to_peak, ..p };
        let l = link(150e-9);
        let a = solve_phasor(&p, &l).unwrap();
        let b = solve_phasor(&doubled, &l).unwrap();
        assert!((b.i1 - 2.0 * a.i1).norm() < 1e-12 * a.i1.norm());
        assert!((b.v_out - 2.0 * a.v_out).norm() < 1e-12 * a.v_out.norm());
        let ta = transfer_function(&p, &l, 3e6).unwrap();
        let tb = transfer_function(&doubled, &l, 3e6).unwrap();
        assert!(rel_err(ta, tb) < 1e-12);
    }

    #[test]
    fn transfer_function_zero_without_coupling() {
        let p = table2_params(0.5, 0.5, 2.976e6);
        for f in [1e6, 3e6, 5e6] {
            assert_eq!(transfer_function(&p, &link(0.0), f).unwrap(), 0.0);
        }
    }

    #[test]
    fn decoupled_input_impedance_is_primary_branch() {
        let p = table2_params(0.5, 0.5, 2.976e6);
        let f = 2.5e6;
        let w = 2.0 * PI * f;
        let z = input_impedance(&p, &link(0.0), f).unwrap();
        let expected = Complex64::new(0.5, w * 1.589e-6 - 1.0 / (w * 1.8e-9));
        assert!((z - expected).norm() < 1e-9 * expected.norm());

        // at primary series resonance the reactance vanishes
        let f0 = resonant_frequency(1.589e-6, 1.8e-9).unwrap();
        let z0 = input_impedance(&p, &link(0.0), f0).unwrap();
        assert!(z0.im.abs() < 1e-9 * z0.re.abs().max(1.0));
    }

    #[test]
    fn reflected_impedance_identity() {
        // Z_in(M) - Z_in(0) = (w M)^2 / Z_sec for series-primary topologies
        let f = 3.05e6;
        let w = 2.0 * PI * f;
        let m = 180e-9;
        for topo in [CompensationTopology::SeriesSeries, CompensationTopology::SeriesParallel] {
            let p = CircuitParams { topology: topo, ..table2_params(0.4, 0.6, f) };
            let l = link(m);
            let z_m = input_impedance(&p, &l, f).unwrap();
            let z_0 = input_impedance(&p, &link(0.0), f).unwrap();
            let jw = Complex64::new(0.0, w);
            let z_sec = match topo {
                CompensationTopology::SeriesSeries => {
                    p.r2 + jw * l.l2 + 1.0 / (jw * p.c2) + p.r_load
                }
                _ => {
                    let zc2 = 1.0 / (jw * p.c2);
                    p.r2 + jw * l.l2 + p.r_load * zc2 / (p.r_load + zc2)
                }
            };
            let reflected = (w * m).powi(2) / z_sec;
            assert!(((z_m - z_0) - reflected).norm() < 1e-9 * reflected.norm(), "{topo}");
        }
    }

    #[test]
    fn invalid_params_rejected() {
        let mut p = table2_params(0.5, 0.5, 2.976e6);
        p.c1 = 0.0;
        assert!(solve_phasor(&p, &link(100e-9)).is_err());
        let mut p = table2_params(0.5, 0.5, 2.976e6);
        p.frequency = -1.0;
        assert!(solve_phasor(&p, &link(100e-9)).is_err());
    }

    #[test]
    fn topology_parsing() {
        assert_eq!("SP".parse::<CompensationTopology>().unwrap(), CompensationTopology::SeriesParallel);
        assert_eq!(CompensationTopology::ParallelSeries.to_string(), "PS");
        assert!("XY".parse::<CompensationTopology>().is_err());
    }
}
