//! Independent oracles used by the integration and acceptance tests.
//!
//! These deliberately avoid the code paths they check: mutual inductance by
//! brute-force Neumann double line integration over polygonal loops, and the
//! circuit by nodal analysis on the full node-level network instead of the
//! two-mesh reduction.

use num_complex::Complex64;
use wptsim::circuit::{CircuitParams, CompensationTopology};
use wptsim::magnetics::CouplingLink;
use wptsim::MU_0;

use std::f64::consts::PI;

/// Neumann formula for two coaxial circular loops, each discretized into
/// `segments` straight elements:
///
/// ```text
/// M = (mu0 / 4 pi) sum_i sum_j dl_i . dl_j / |r_ij|
/// ```
pub fn neumann_mutual(radius_a: f64, radius_b: f64, gap: f64, segments: usize) -> f64 {
    let dphi = 2.0 * PI / segments as f64;
    // segment midpoints and tangent vectors for each loop
    let ring = |radius: f64, z: f64| -> Vec<([f64; 3], [f64; 3])> {
        (0..segments)
            .map(|s| {
                let phi0 = s as f64 * dphi;
                let phi1 = phi0 + dphi;
                let p0 = [radius * phi0.cos(), radius * phi0.sin(), z];
                let p1 = [radius * phi1.cos(), radius * phi1.sin(), z];
                (
                    [0.5 * (p0[0] + p1[0]), 0.5 * (p0[1] + p1[1]), z],
                    [p1[0] - p0[0], p1[1] - p0[1], 0.0],
                )
            })
            .collect()
    };
    let loop_a = ring(radius_a, 0.0);
    let loop_b = ring(radius_b, gap);
    let mut sum = 0.0;
    for (ma, dla) in &loop_a {
        for (mb, dlb) in &loop_b {
            let r = [(ma[0] - mb[0]), (ma[1] - mb[1]), (ma[2] - mb[2])];
            let dist = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
            sum += (dla[0] * dlb[0] + dla[1] * dlb[1] + dla[2] * dlb[2]) / dist;
        }
    }
    MU_0 / (4.0 * PI) * sum
}

/// Dense complex linear solve by Gaussian elimination with partial pivoting.
fn solve_dense(mut a: Vec<Vec<Complex64>>, mut b: Vec<Complex64>) -> Vec<Complex64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        let diag = a[col][col];
        assert!(diag.norm() > 0.0, "singular oracle system");
        for row in (col + 1)..n {
            let factor = a[row][col] / diag;
            for k in col..n {
                let v = a[col][k];
                a[row][k] -= factor * v;
            }
            let rhs = b[col];
            b[row] -= factor * rhs;
        }
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in (row + 1)..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    x
}

/// Observables extracted from the nodal solution.
#[allow(dead_code)] // not every test binary reads every observable
pub struct NodalSolution {
    pub v_out_mag: f64,
    pub i1_mag: f64,
    pub i2_mag: f64,
    pub p_in: f64,
    pub p_load: f64,
    pub p_loss: f64,
    pub efficiency: f64,
}

/// Nodal-analysis solve of the compensated link.
///
/// Node map (0 = ground):
///   1  source terminal
///   2  junction between R1 and L1 (series primary) or after R1 (parallel)
///   3  top of L1
///   4  top of L2
///   5  after R2
///   6  load node for series secondary
///
/// Series primary: Vs(1) - C1(1,2) - R1(2,3) - L1(3,0).
/// Parallel primary: C1(1,0), R1(1,3) - L1(3,0).
/// Series secondary: L2(4,0) - R2(4,5) - C2(5,6) - RL(6,0).
/// Parallel secondary: L2(4,0) - R2(4,5) - [C2 || RL](5,0).
pub fn nodal_solve(params: &CircuitParams, link: &CouplingLink) -> NodalSolution {
    let w = 2.0 * PI * params.frequency;
    let jw = Complex64::new(0.0, w);
    let n_nodes = 6; // nodes 1..=6, ground excluded
    let n = n_nodes + 1; // plus source branch current
    let is_idx = n_nodes;
    let mut a = vec![vec![Complex64::new(0.0, 0.0); n]; n];
    let mut rhs = vec![Complex64::new(0.0, 0.0); n];

    let stamp_y = |a: &mut Vec<Vec<Complex64>>, p: usize, q: usize, y: Complex64| {
        // p, q are node labels; 0 = ground
        if p > 0 {
            a[p - 1][p - 1] += y;
        }
        if q > 0 {
            a[q - 1][q - 1] += y;
        }
        if p > 0 && q > 0 {
            a[p - 1][q - 1] -= y;
            a[q - 1][p - 1] -= y;
        }
    };

    let y_c1 = jw * params.c1;
    let y_c2 = jw * params.c2;
    let y_r1 = Complex64::new(1.0 / params.r1.max(1e-12), 0.0);
    let y_r2 = Complex64::new(1.0 / params.r2.max(1e-12), 0.0);
    let y_rl = Complex64::new(1.0 / params.r_load, 0.0);

    // zero-ESR cases are handled by collapsing the resistor into a huge
    // admittance; keep it finite but big enough that 1e-12 ohm is invisible
    // at the 1e-9 comparison level
    let series_primary = matches!(
        params.topology,
        CompensationTopology::SeriesSeries | CompensationTopology::SeriesParallel
    );
    let series_secondary = matches!(
        params.topology,
        CompensationTopology::SeriesSeries | CompensationTopology::ParallelSeries
    );

    if series_primary {
        stamp_y(&mut a, 1, 2, y_c1);
        stamp_y(&mut a, 2, 3, y_r1);
    } else {
        stamp_y(&mut a, 1, 0, y_c1);
        stamp_y(&mut a, 1, 3, y_r1);
        // node 2 is unused here; tie it down so the system stays regular
        stamp_y(&mut a, 2, 0, Complex64::new(1.0, 0.0));
    }
    stamp_y(&mut a, 4, 5, y_r2);
    if series_secondary {
        stamp_y(&mut a, 5, 6, y_c2);
        stamp_y(&mut a, 6, 0, y_rl);
    } else {
        stamp_y(&mut a, 5, 0, y_c2);
        stamp_y(&mut a, 5, 0, y_rl);
        // node 6 is unused here; tie it down so the system stays regular
        stamp_y(&mut a, 6, 0, Complex64::new(1.0, 0.0));
    }

    // coupled inductors L1(3,0), L2(4,0): Y = inv(jw [[L1 M],[M L2]])
    let det_l = jw * (link.l1 * link.l2 - link.m * link.m);
    let y11 = Complex64::new(link.l2, 0.0) / det_l;
    let y22 = Complex64::new(link.l1, 0.0) / det_l;
    let y12 = Complex64::new(-link.m, 0.0) / det_l;
    a[2][2] += y11;
    a[2][3] += y12;
    a[3][2] += y12;
    a[3][3] += y22;

    // ideal source Vs at node 1
    let vs = Complex64::new(params.source_peak(), 0.0);
    a[0][is_idx] += Complex64::new(1.0, 0.0);
    a[is_idx][0] += Complex64::new(1.0, 0.0);
    rhs[is_idx] = vs;

    let x = solve_dense(a, rhs);
    let v = |node: usize| -> Complex64 {
        if node == 0 {
            Complex64::new(0.0, 0.0)
        } else {
            x[node - 1]
        }
    };

    // source delivers -i_s into node 1 with this stamp orientation
    let i_src = -x[is_idx];
    let p_in = 0.5 * (vs * i_src.conj()).re;

    let v_out = if series_secondary { v(6) } else { v(5) };
    let p_load = 0.5 * v_out.norm_sqr() / params.r_load;

    // coil currents from the inductor admittance
    let i1 = y11 * v(3) + y12 * v(4);
    let i2 = y12 * v(3) + y22 * v(4);
    let i_r1 = if series_primary {
        (v(2) - v(3)) * y_r1
    } else {
        (v(1) - v(3)) * y_r1
    };
    let i_r2 = (v(4) - v(5)) * y_r2;
    let p_loss = 0.5 * (i_r1.norm_sqr() * params.r1 + i_r2.norm_sqr() * params.r2);

    NodalSolution {
        v_out_mag: v_out.norm(),
        i1_mag: i1.norm(),
        i2_mag: i2.norm(),
        p_in,
        p_load,
        p_loss,
        efficiency: if p_in > 0.0 { p_load / p_in } else { 0.0 },
    }
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
