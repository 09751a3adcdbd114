//! Sweeps and parameter fitting around the circuit model.
//!
//! Frequency and gap sweeps tabulate the observables of the phasor solution;
//! the fit routines invert the model for quantities that are only available
//! as measurements: a (M, R_total) pair matching scalar power/efficiency
//! anchors, and per-gap coupling from rms output voltages.

use serde::Serialize;

use crate::circuit::{solve_phasor, CircuitParams};
use crate::coil::SpiralCoil;
use crate::error::{Error, Result};
use crate::magnetics::{mutual_inductance_coils, CouplingLink};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Spacing rule for frequency sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SweepSpacing {
    Linear,
    Log,
}

/// One sweep row: the independent variable plus the observables at that point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub vout_peak: f64,
    pub vout_rms: f64,
    pub efficiency: f64,
    pub p_load: f64,
    pub p_in: f64,
    /// |V_out / V_in|.
    pub ratio: f64,
}

/// Ordered sweep results, serializable to CSV and JSON.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    /// Independent variable name, e.g. "frequency" or "gap".
    pub var: String,
    /// Unit of the independent variable, e.g. "Hz" or "m".
    pub unit: String,
    pub rows: Vec<SweepRow>,
    /// Points skipped because the solver or coupling model rejected them.
    pub flagged: usize,
}

impl SweepTable {
    /// CSV with header `var,unit,vout_peak_V,vout_rms_V,efficiency,p_load_W,p_in_W,ratio`,
    /// 9 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("var,unit,vout_peak_V,vout_rms_V,efficiency,p_load_W,p_in_W,ratio\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{:.8e},{},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e},{:.8e}\n",
                r.value, self.unit, r.vout_peak, r.vout_rms, r.efficiency, r.p_load, r.p_in, r.ratio
            ));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sweep table serializes")
    }
}

fn row_from_solution(params: &CircuitParams, link: &CouplingLink, value: f64) -> Result<SweepRow> {
    let sol = solve_phasor(params, link)?;
    let vout = sol.v_out.norm();
    Ok(SweepRow {
        value,
        vout_peak: vout,
        vout_rms: vout / SQRT_2,
        efficiency: sol.efficiency,
        p_load: sol.p_load,
        p_in: sol.p_in,
        ratio: vout / params.source_peak(),
    })
}

/// Sweep the drive frequency from `f_start` to `f_stop` over `points` samples.
pub fn frequency_sweep(
    params: &CircuitParams,
    link: &CouplingLink,
    f_start: f64,
    f_stop: f64,
    points: usize,
    spacing: SweepSpacing,
) -> Result<SweepTable> {
    if !(f_start > 0.0 && f_stop > f_start) {
        return Err(Error::Precondition(format!(
            "need 0 < f_start < f_stop, got ({f_start}, {f_stop})"
        )));
    }
    if points < 2 {
        return Err(Error::Precondition("need at least 2 sweep points".into()));
    }
    let mut rows = Vec::with_capacity(points);
    let mut flagged = 0;
    for i in 0..points {
        let t = i as f64 / (points - 1) as f64;
        let f = match spacing {
            SweepSpacing::Linear => f_start + (f_stop - f_start) * t,
            SweepSpacing::Log => f_start * (f_stop / f_start).powf(t),
        };
        let p = CircuitParams { frequency: f, ..*params };
        match row_from_solution(&p, link, f) {
            Ok(row) => rows.push(row),
            Err(_) => flagged += 1,
        }
    }
    Ok(SweepTable {
        var: "frequency".into(),
        unit: "Hz".into(),
        rows,
        flagged,
    })
}

/// Sweep the coil gap: M from the filament model at each gap, then the phasor
/// solution at the configured drive frequency. Gaps must be positive; rows
/// with unphysical coupling are flagged and skipped.
pub fn gap_sweep(
    params: &CircuitParams,
    tx: &SpiralCoil,
    rx: &SpiralCoil,
    gaps: &[f64],
    subdivisions: u32,
) -> Result<SweepTable> {
    if gaps.is_empty() {
        return Err(Error::Precondition("empty gap list".into()));
    }
    if gaps.iter().any(|g| !(*g > 0.0)) {
        return Err(Error::Precondition("all gaps must be > 0".into()));
    }
    let mut gaps_sorted = gaps.to_vec();
    gaps_sorted.sort_by(f64::total_cmp);
    let l1 = tx.self_inductance();
    let l2 = rx.self_inductance();
    let mut rows = Vec::with_capacity(gaps_sorted.len());
    let mut flagged = 0;
    for &gap in &gaps_sorted {
        let result = mutual_inductance_coils(tx, rx, gap, subdivisions)
            .and_then(|m| CouplingLink::new(l1, l2, m))
            .and_then(|link| row_from_solution(params, &link, gap));
        match result {
            Ok(row) => rows.push(row),
            Err(_) => flagged += 1,
        }
    }
    Ok(SweepTable {
        var: "gap".into(),
        unit: "m".into(),
        rows,
        flagged,
    })
}

/// Gap/voltage measurements plus optional scalar anchors at the operating
/// point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasurementSet {
    /// (gap m, output voltage rms V), gaps strictly increasing.
    pub samples: Vec<(f64, f64)>,
    /// Measured efficiency anchor.
    pub efficiency: Option<f64>,
    /// Measured load power anchor, W.
    pub p_load: Option<f64>,
}

impl MeasurementSet {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        for pair in samples.windows(2) {
            if pair[1].0 <= pair[0].0 {
                return Err(Error::Precondition("gaps must be strictly increasing".into()));
            }
        }
        if samples.iter().any(|(g, v)| !(*g > 0.0) || !(*v >= 0.0)) {
            return Err(Error::Precondition("gaps must be > 0 and voltages >= 0".into()));
        }
        Ok(Self { samples, efficiency: None, p_load: None })
    }

    pub fn with_anchors(mut self, efficiency: f64, p_load: f64) -> Self {
        self.efficiency = Some(efficiency);
        self.p_load = Some(p_load);
        self
    }

    /// Parse CSV with header `gap_mm,vrms_V`.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::ConfigParse("empty measurement CSV".into()))?;
        if header.trim() != "gap_mm,vrms_V" {
            return Err(Error::ConfigParse(format!(
                "expected header 'gap_mm,vrms_V', got {header:?}"
            )));
        }
        let mut samples = Vec::new();
        for (idx, line) in lines.enumerate() {
            let mut cols = line.split(',');
            let gap_mm: f64 = cols
                .next()
                .and_then(|c| c.trim().parse().ok())
                .ok_or_else(|| Error::ConfigParse(format!("bad gap_mm on data row {}", idx + 1)))?;
            let vrms: f64 = cols
                .next()
                .and_then(|c| c.trim().parse().ok())
                .ok_or_else(|| Error::ConfigParse(format!("bad vrms_V on data row {}", idx + 1)))?;
            if cols.next().is_some() {
                return Err(Error::ConfigParse(format!("extra column on data row {}", idx + 1)));
            }
            if !gap_mm.is_finite() || !vrms.is_finite() {
                return Err(Error::ConfigParse(format!("non-finite value on data row {}", idx + 1)));
            }
            samples.push((gap_mm * 1e-3, vrms));
        }
        Self::new(samples)
    }
}

/// Outcome of a model-parameter fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    /// Fitted mutual inductance, H.
    pub m: f64,
    /// Fitted total ESR (split equally between the two coils), ohm.
    pub r_total: f64,
    /// Root of the summed squared relative residuals at the optimum.
    pub residual: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Residual target declared by the fit: below this the result is converged.
pub const FIT_RESIDUAL_TOL: f64 = 1e-6;

fn fit_objective(
    params: &CircuitParams,
    l1: f64,
    l2: f64,
    p_load_anchor: f64,
    eta_anchor: f64,
    m: f64,
    r_total: f64,
) -> Option<(f64, f64)> {
    let link = CouplingLink::new(l1, l2, m).ok()?;
    let p = CircuitParams { r1: 0.5 * r_total, r2: 0.5 * r_total, ..*params };
    let sol = solve_phasor(&p, &link).ok()?;
    if sol.p_in <= 0.0 {
        return None;
    }
    Some((
        (sol.p_load - p_load_anchor) / p_load_anchor,
        (sol.efficiency - eta_anchor) / eta_anchor,
    ))
}

/// Fit (M, R_total) so the model reproduces the measured load power and
/// efficiency anchors at the drive frequency. Derivative-free simplex search
/// from a grid of starting points, then Newton polish on the two residuals.
pub fn fit_link_parameters(
    anchors: &MeasurementSet,
    params: &CircuitParams,
    l1: f64,
    l2: f64,
) -> Result<FitResult> {
    params.validate()?;
    let (Some(p_load), Some(eta)) = (anchors.p_load, anchors.efficiency) else {
        return Err(Error::Precondition(
            "need both a load-power and an efficiency anchor (2 scalars for 2 parameters)".into(),
        ));
    };
    if !(p_load > 0.0 && eta > 0.0 && eta < 1.0) {
        return Err(Error::Precondition("anchors must satisfy P > 0, 0 < eta < 1".into()));
    }
    let m_max = 0.999 * (l1 * l2).sqrt();
    let r_max = 100.0;
    let cost = |x: [f64; 2]| -> f64 {
        if !(x[0] > 0.0 && x[0] < m_max && x[1] > 0.0 && x[1] < r_max) {
            return f64::INFINITY;
        }
        match fit_objective(params, l1, l2, p_load, eta, x[0], x[1]) {
            Some((r1, r2)) => r1 * r1 + r2 * r2,
            None => f64::INFINITY,
        }
    };

    let mut best = ([0.25 * m_max, 1.0], f64::INFINITY);
    let mut iterations = 0;
    // coarse multi-start simplex
    for im in 1..=5 {
        for ir in 0..5 {
            let start = [im as f64 / 6.0 * m_max, 10.0_f64.powf(ir as f64 - 2.0)];
            let (x, fx, it) = nelder_mead_2d(&cost, start, [0.05 * m_max, 0.5 * start[1]], 400);
            iterations += it;
            if fx < best.1 {
                best = (x, fx);
            }
        }
    }
    // Newton polish on the residual pair
    let mut x = best.0;
    for _ in 0..60 {
        iterations += 1;
        let Some((f1, f2)) = fit_objective(params, l1, l2, p_load, eta, x[0], x[1]) else {
            break;
        };
        if f1 * f1 + f2 * f2 < 1e-28 {
            break;
        }
        let hm = (x[0].abs() * 1e-7).max(1e-18);
        let hr = (x[1].abs() * 1e-7).max(1e-12);
        let (Some((a1, a2)), Some((b1, b2))) = (
            fit_objective(params, l1, l2, p_load, eta, x[0] + hm, x[1]),
            fit_objective(params, l1, l2, p_load, eta, x[0], x[1] + hr),
        ) else {
            break;
        };
        let j = [[(a1 - f1) / hm, (b1 - f1) / hr], [(a2 - f2) / hm, (b2 - f2) / hr]];
        let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
        if det.abs() < 1e-30 {
            break;
        }
        let dx = [
            (f1 * j[1][1] - f2 * j[0][1]) / det,
            (f2 * j[0][0] - f1 * j[1][0]) / det,
        ];
        let mut step = 1.0;
        let f_old = f1 * f1 + f2 * f2;
        loop {
            let cand = [x[0] - step * dx[0], x[1] - step * dx[1]];
            if cost(cand) < f_old {
                x = cand;
                break;
            }
            step *= 0.5;
            if step < 1e-8 {
                break;
            }
        }
        if step < 1e-8 {
            break;
        }
    }
    let residual = cost(x).sqrt();
    Ok(FitResult {
        m: x[0],
        r_total: x[1],
        residual,
        converged: residual <= FIT_RESIDUAL_TOL,
        iterations,
    })
}

/// Minimal Nelder-Mead on two variables. Returns (best point, best value,
/// evaluations).
fn nelder_mead_2d(
    f: &dyn Fn([f64; 2]) -> f64,
    start: [f64; 2],
    scale: [f64; 2],
    max_iter: usize,
) -> ([f64; 2], f64, usize) {
    let mut simplex = [
        start,
        [start[0] + scale[0], start[1]],
        [start[0], start[1] + scale[1]],
    ];
    let mut values = simplex.map(&f);
    let mut evals = 3;
    for _ in 0..max_iter {
        // order best..worst
        let mut idx = [0, 1, 2];
        idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let (b, m, w) = (idx[0], idx[1], idx[2]);
        if values[w].is_finite()
            && (values[w] - values[b]).abs() <= 1e-16 * (1.0 + values[b].abs())
        {
            break;
        }
        let centroid = [
            0.5 * (simplex[b][0] + simplex[m][0]),
            0.5 * (simplex[b][1] + simplex[m][1]),
        ];
        let reflect = [
            centroid[0] + (centroid[0] - simplex[w][0]),
            centroid[1] + (centroid[1] - simplex[w][1]),
        ];
        let fr = f(reflect);
        evals += 1;
        if fr < values[b] {
            let expand = [
                centroid[0] + 2.0 * (centroid[0] - simplex[w][0]),
                centroid[1] + 2.0 * (centroid[1] - simplex[w][1]),
            ];
            let fe = f(expand);
            evals += 1;
            if fe < fr {
                simplex[w] = expand;
                values[w] = fe;
            } else {
                simplex[w] = reflect;
                values[w] = fr;
            }
        } else if fr < values[m] {
            simplex[w] = reflect;
            values[w] = fr;
        } else {
            let contract = [
                centroid[0] + 0.5 * (simplex[w][0] - centroid[0]),
                centroid[1] + 0.5 * (simplex[w][1] - centroid[1]),
            ];
            let fc = f(contract);
            evals += 1;
            if fc < values[w] {
                simplex[w] = contract;
                values[w] = fc;
            } else {
                // shrink toward best
                for i in 0..3 {
                    if i != b {
                        simplex[i] = [
                            simplex[b][0] + 0.5 * (simplex[i][0] - simplex[b][0]),
                            simplex[b][1] + 0.5 * (simplex[i][1] - simplex[b][1]),
                        ];
                        values[i] = f(simplex[i]);
                        evals += 1;
                    }
                }
            }
        }
    }
    let mut best = 0;
    for i in 1..3 {
        if values[i] < values[best] {
            best = i;
        }
    }
    (simplex[best], values[best], evals)
}

/// Per-gap coupling estimate; `m_est` is `None` where no M in
/// [0, sqrt(L1 L2)) reproduces the measured voltage.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapCoupling {
    pub gap: f64,
    pub m_est: Option<f64>,
}

const BISECTION_REL_TOL: f64 = 1e-6;

/// Invert each measured rms voltage into an equivalent mutual inductance by
/// bisection of |V_out|(M) on its rising branch, smallest root first.
pub fn per_gap_coupling_from_voltage(
    measurements: &MeasurementSet,
    params: &CircuitParams,
    l1: f64,
    l2: f64,
) -> Result<Vec<GapCoupling>> {
    params.validate()?;
    let m_max = 0.999_999 * (l1 * l2).sqrt();
    let vout_peak = |m: f64| -> Option<f64> {
        let link = CouplingLink::new(l1, l2, m).ok()?;
        solve_phasor(params, &link).ok().map(|s| s.v_out.norm())
    };
    let mut out = Vec::with_capacity(measurements.samples.len());
    for &(gap, vrms) in &measurements.samples {
        let target = vrms * SQRT_2;
        if target == 0.0 {
            out.push(GapCoupling { gap, m_est: Some(0.0) });
            continue;
        }
        // scan for the first bracket: |V_out| starts at 0 at M = 0
        const SCAN: usize = 2000;
        let mut lo = 0.0;
        let mut bracket = None;
        for i in 1..=SCAN {
            let m = m_max * i as f64 / SCAN as f64;
            match vout_peak(m) {
                Some(v) if v >= target => {
                    bracket = Some((lo, m));
                    break;
                }
                Some(_) => lo = m,
                None => break,
            }
        }
        let Some((mut lo, mut hi)) = bracket else {
            out.push(GapCoupling { gap, m_est: None });
            continue;
        };
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if hi - lo <= BISECTION_REL_TOL * mid {
                break;
            }
            match vout_peak(mid) {
                Some(v) if v < target => lo = mid,
                Some(_) => hi = mid,
                None => break,
            }
        }
        out.push(GapCoupling { gap, m_est: Some(0.5 * (lo + hi)) });
    }
    Ok(out)
}
