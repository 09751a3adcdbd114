//! Coupling and field computations for coaxial spiral coils.
//!
//! Mutual inductance uses Maxwell's coaxial-loop formula on the filament
//! decomposition; the magnetic field is a Biot-Savart segment sum over the
//! same filaments. The complete elliptic integrals are evaluated by the
//! arithmetic-geometric-mean iteration.
//!
//! Elliptic-integral convention: all functions here take the *parameter*
//! m = k^2, not the modulus k.

use num_complex::Complex64;
use serde::Serialize;

use crate::coil::{FilamentSet, SpiralCoil};
use crate::error::{Error, Result};
use crate::MU_0;

use std::f64::consts::PI;

/// Default number of straight segments per circular filament.
pub const DEFAULT_SEGMENTS: usize = 360;

const AGM_MAX_ITER: usize = 40;
const AGM_EPS: f64 = 1e-16;

/// Complete elliptic integrals of the first and second kind, (K(m), E(m)),
/// with parameter m = k^2 in [0, 1). Relative error below 1e-10 (AGM
/// converges quadratically).
pub fn elliptic_ke(m: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&m) {
        return Err(Error::Domain(format!(
            "elliptic parameter m must be in [0, 1), got {m}"
        )));
    }
    if m == 0.0 {
        return Ok((PI / 2.0, PI / 2.0));
    }
    // AGM: K = pi / (2 * agm(1, sqrt(1-m)))
    // E = K * (1 - sum 2^(n-1) c_n^2) with c_0^2 = m
    let mut a = 1.0_f64;
    let mut b = (1.0 - m).sqrt();
    let mut c = m.sqrt();
    let mut sum = 0.5 * c * c;
    let mut pow2 = 0.5;
    for _ in 0..AGM_MAX_ITER {
        if c.abs() < AGM_EPS * a {
            break;
        }
        let an = 0.5 * (a + b);
        let bn = (a * b).sqrt();
        c = 0.5 * (a - b);
        a = an;
        b = bn;
        pow2 *= 2.0;
        sum += pow2 * c * c;
    }
    let k = PI / (2.0 * a);
    let e = k * (1.0 - sum);
    Ok((k, e))
}

/// Mutual inductance in henries between two coaxial circular filaments of
/// radii `radius_a`, `radius_b` separated axially by `axial_gap` (Maxwell's
/// formula):
///
/// ```text
/// M = mu0 sqrt(a b) [ (2/kappa - kappa) K(kappa^2) - (2/kappa) E(kappa^2) ]
/// kappa^2 = 4 a b / ((a + b)^2 + d^2)
/// ```
pub fn mutual_inductance_loops(radius_a: f64, radius_b: f64, axial_gap: f64) -> Result<f64> {
    if !(radius_a > 0.0 && radius_b > 0.0) {
        return Err(Error::Domain(format!(
            "loop radii must be > 0, got ({radius_a}, {radius_b})"
        )));
    }
    let kappa_sq = 4.0 * radius_a * radius_b
        / ((radius_a + radius_b).powi(2) + axial_gap * axial_gap);
    if kappa_sq >= 1.0 {
        // only possible for coincident identical filaments
        return Err(Error::Singularity(format!(
            "coincident filaments: a = b = {radius_a}, d = {axial_gap}"
        )));
    }
    let kappa = kappa_sq.sqrt();
    let (k_int, e_int) = elliptic_ke(kappa_sq)?;
    Ok(MU_0 * (radius_a * radius_b).sqrt()
        * ((2.0 / kappa - kappa) * k_int - (2.0 / kappa) * e_int))
}

/// Mutual inductance in henries between two coaxial spiral coils separated by
/// `gap`, via filament-pair summation. Each turn is represented by
/// `subdivisions` concentric filaments; the per-turn contributions are the
/// averages over those filaments, so the sum converges as `subdivisions`
/// grows.
pub fn mutual_inductance_coils(
    tx: &SpiralCoil,
    rx: &SpiralCoil,
    gap: f64,
    subdivisions: u32,
) -> Result<f64> {
    if !(gap > 0.0) {
        return Err(Error::Domain(format!("gap must be > 0, got {gap}")));
    }
    let fa = tx.to_filaments(subdivisions);
    let fb = rx.to_filaments(subdivisions);
    mutual_inductance_filaments(&fa, &fb, gap)
}

/// Filament-set form of [`mutual_inductance_coils`]; `gap` is the axial
/// distance between the two filament planes.
pub fn mutual_inductance_filaments(
    tx: &FilamentSet,
    rx: &FilamentSet,
    gap: f64,
) -> Result<f64> {
    if !(gap > 0.0) {
        return Err(Error::Domain(format!("gap must be > 0, got {gap}")));
    }
    let mut sum = 0.0;
    for fa in &tx.filaments {
        for fb in &rx.filaments {
            let d = gap + fb.axial_position - fa.axial_position;
            sum += mutual_inductance_loops(fa.radius, fb.radius, d)?;
        }
    }
    let norm = (tx.subdivisions_per_turn as f64) * (rx.subdivisions_per_turn as f64);
    Ok(sum / norm)
}

/// k = M / sqrt(L1 L2). Errors if the triple is unphysical (k >= 1).
pub fn coupling_coefficient(m: f64, l1: f64, l2: f64) -> Result<f64> {
    if !(l1 > 0.0 && l2 > 0.0) {
        return Err(Error::Domain(format!(
            "inductances must be > 0, got ({l1}, {l2})"
        )));
    }
    if !(m >= 0.0) {
        return Err(Error::Domain(format!("mutual inductance must be >= 0, got {m}")));
    }
    let k = m / (l1 * l2).sqrt();
    if k >= 1.0 {
        return Err(Error::UnphysicalCoupling { k });
    }
    Ok(k)
}

/// Electrical description of the magnetically coupled coil pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CouplingLink {
    /// Primary self-inductance, H.
    pub l1: f64,
    /// Secondary self-inductance, H.
    pub l2: f64,
    /// Mutual inductance, H.
    pub m: f64,
    /// Coupling coefficient M / sqrt(L1 L2).
    pub k: f64,
}

impl CouplingLink {
    pub fn new(l1: f64, l2: f64, m: f64) -> Result<Self> {
        let k = coupling_coefficient(m, l1, l2)?;
        Ok(Self { l1, l2, m, k })
    }

    /// Link for two coils at `gap`, with L from the current-sheet formula and
    /// M from the filament model.
    pub fn from_coils(tx: &SpiralCoil, rx: &SpiralCoil, gap: f64, subdivisions: u32) -> Result<Self> {
        let m = mutual_inductance_coils(tx, rx, gap, subdivisions)?;
        Self::new(tx.self_inductance(), rx.self_inductance(), m)
    }
}

/// Magnetic flux density in tesla at `point` (x, y, z in meters) from the
/// filament set carrying `current` amperes, each circular filament discretized
/// into `segments` straight elements:
///
/// ```text
/// B = (mu0 / 4 pi) * sum I dl x r / |r|^3
/// ```
///
/// Errors if the point lies within one segment length of a conductor.
pub fn biot_savart_field(
    filaments: &FilamentSet,
    current: f64,
    point: [f64; 3],
    segments: usize,
) -> Result<[f64; 3]> {
    let segments = segments.max(3);
    let rho = (point[0] * point[0] + point[1] * point[1]).sqrt();
    for f in &filaments.filaments {
        let seg_len = 2.0 * PI * f.radius / segments as f64;
        let dist_sq = (rho - f.radius).powi(2) + (point[2] - f.axial_position).powi(2);
        if dist_sq < seg_len * seg_len {
            return Err(Error::Singularity(format!(
                "point within one segment length of the filament at r = {}",
                f.radius
            )));
        }
    }
    let mut b = [0.0; 3];
    let coeff = MU_0 / (4.0 * PI) * current;
    for f in &filaments.filaments {
        let dphi = 2.0 * PI / segments as f64;
        for s in 0..segments {
            // midpoint and tangent of the straight segment
            let phi0 = s as f64 * dphi;
            let phi1 = phi0 + dphi;
            let (x0, y0) = (f.radius * phi0.cos(), f.radius * phi0.sin());
            let (x1, y1) = (f.radius * phi1.cos(), f.radius * phi1.sin());
            let mid = [0.5 * (x0 + x1), 0.5 * (y0 + y1), f.axial_position];
            let dl = [x1 - x0, y1 - y0, 0.0];
            let r = [point[0] - mid[0], point[1] - mid[1], point[2] - mid[2]];
            let r_norm_sq = r[0] * r[0] + r[1] * r[1] + r[2] * r[2];
            let inv_r3 = 1.0 / (r_norm_sq * r_norm_sq.sqrt());
            b[0] += coeff * (dl[1] * r[2] - dl[2] * r[1]) * inv_r3;
            b[1] += coeff * (dl[2] * r[0] - dl[0] * r[2]) * inv_r3;
            b[2] += coeff * (dl[0] * r[1] - dl[1] * r[0]) * inv_r3;
        }
    }
    Ok(b)
}

/// Closed-form on-axis flux density of a single circular loop, used as an
/// independent check of the segment sum.
pub fn loop_field_on_axis(radius: f64, current: f64, z: f64) -> f64 {
    MU_0 * current * radius * radius / (2.0 * (radius * radius + z * z).powf(1.5))
}

/// Rectangular sampling grid in an axial slice (the x-z plane through the
/// coil axis).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub z_min: f64,
    pub z_max: f64,
    pub nz: usize,
}

/// One field sample; `b` is `None` where the point fell inside the
/// singularity guard.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub x: f64,
    pub z: f64,
    pub b: Option<[f64; 3]>,
}

/// Sampled B-field on an axial slice.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub samples: Vec<FieldSample>,
    pub dropped: usize,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct FieldGridSummary {
    pub total_points: usize,
    pub dropped_points: usize,
}

impl FieldGrid {
    /// CSV with header `x_m,z_m,Bx_T,By_T,Bz_T,Bnorm_T`; dropped points carry
    /// NaN fields.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x_m,z_m,Bx_T,By_T,Bz_T,Bnorm_T\n");
        for s in &self.samples {
            match s.b {
                Some(b) => {
                    let norm = (b[0] * b[0] + b[1] * b[1] + b[2] * b[2]).sqrt();
                    out.push_str(&format!(
                        "{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e}\n",
                        s.x, s.z, b[0], b[1], b[2], norm
                    ));
                }
                None => {
                    out.push_str(&format!("{:.8e},{:.8e},NaN,NaN,NaN,NaN\n", s.x, s.z));
                }
            }
        }
        out
    }

    pub fn summary(&self) -> FieldGridSummary {
        FieldGridSummary {
            total_points: self.samples.len(),
            dropped_points: self.dropped,
        }
    }
}

/// Sample the coil's B-field over `grid`, dropping (and counting) points that
/// land inside the singularity guard.
pub fn field_map(
    coil: &SpiralCoil,
    current: f64,
    grid: &GridSpec,
    segments: usize,
) -> Result<FieldGrid> {
    if grid.nx < 1 || grid.nz < 1 {
        return Err(Error::Domain("grid must have at least one point per axis".into()));
    }
    if !current.is_finite() {
        return Err(Error::Domain("current must be finite".into()));
    }
    let filaments = coil.to_filaments(1);
    let mut samples = Vec::with_capacity(grid.nx * grid.nz);
    let mut dropped = 0;
    for ix in 0..grid.nx {
        let x = if grid.nx == 1 {
            grid.x_min
        } else {
            grid.x_min + (grid.x_max - grid.x_min) * ix as f64 / (grid.nx - 1) as f64
        };
        for iz in 0..grid.nz {
            let z = if grid.nz == 1 {
                grid.z_min
            } else {
                grid.z_min + (grid.z_max - grid.z_min) * iz as f64 / (grid.nz - 1) as f64
            };
            let b = match biot_savart_field(&filaments, current, [x, 0.0, z], segments) {
                Ok(b) => Some(b),
                Err(Error::Singularity(_)) => {
                    dropped += 1;
                    None
                }
                Err(e) => return Err(e),
            };
            samples.push(FieldSample { x, z, b });
        }
    }
    Ok(FieldGrid { samples, dropped })
}

/// Induced voltage phasor across the secondary: V = j omega M I1.
pub fn induced_voltage_phasor(m: f64, omega: f64, i1: Complex64) -> Complex64 {
    Complex64::new(0.0, omega * m) * i1
}

/// Air-gap reluctance R_g = l_g / (mu0 A_g) in 1/H. Only meaningful when the
/// gap is small compared to the cross-section dimensions.
pub fn air_gap_reluctance(gap_length: f64, gap_area: f64) -> Result<f64> {
    if !(gap_length > 0.0 && gap_area > 0.0) {
        return Err(Error::Domain(format!(
            "gap length and area must be > 0, got ({gap_length}, {gap_area})"
        )));
    }
    Ok(gap_length / (MU_0 * gap_area))
}
