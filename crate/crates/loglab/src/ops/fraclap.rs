//! Assembly of the integral fractional Laplacian on a uniform grid.
//!
//! Row `i` evaluates `c_{1,s} p.v. int (u(x_i) - u(y)) |x_i - y|^{-1-2s} dy`
//! for the piecewise-linear interpolant of the nodal values:
//!
//! * on the two cells touching `x_i`, the interpolant is replaced by the
//!   quadratic through the three nearest nodes, whose principal value is
//!   `-(u_{i+1} - 2u_i + u_{i-1}) h^{-2s} / (2 - 2s)` in closed form;
//! * every other cell contributes exact kernel moments of the linear
//!   interpolant, giving a symmetric Toeplitz band;
//! * the exterior tail is `u(x_i) [(x_i-a)^{-2s} + (b-x_i)^{-2s}] / (2s)`.
//!
//! Nodal interpolation cannot resolve the `dist^s` edge behavior that
//! solutions of the Dirichlet problem carry, so the diagonal additionally
//! receives a correction computed from the half-line profile `t^s`, which
//! the continuum operator annihilates. The scheme's response to that profile
//! is therefore pure error, and it is proportional to the profile's value at
//! the node; subtracting it restores first-order consistency up to the
//! boundary for functions with `dist^s` edges while leaving smooth inputs
//! essentially untouched (the correction scales like `h^{1-2s} u_i` there).

use super::{AssemblyMeta, Dense, NonlocalOperator, OperatorKind};
use crate::error::{invalid, Result};
use crate::grid::Grid1D;
use crate::par;
use crate::specialfn::const_c_ns;
use std::sync::Arc;

/// Kernel moments over `[t0, t1]`, `0 < t0 < t1`:
/// `I0 = int t^{-1-2s} dt`, `I1 = int t^{-2s} dt`.
fn moments(s: f64, t0: f64, t1: f64) -> (f64, f64) {
    let i0 = (t0.powf(-2.0 * s) - t1.powf(-2.0 * s)) / (2.0 * s);
    let i1 = if (s - 0.5).abs() < 1e-13 {
        (t1 / t0).ln()
    } else {
        (t1.powf(1.0 - 2.0 * s) - t0.powf(1.0 - 2.0 * s)) / (1.0 - 2.0 * s)
    };
    (i0, i1)
}

/// Scheme output on the half-line profile `v_j = j^s` (dimensionless,
/// `h = 1`), one value per node distance from the boundary. The continuum
/// operator maps the profile to zero, so these are the boundary errors the
/// diagonal correction removes.
fn boundary_model_errors(s: f64, n: usize, cells: usize) -> Vec<f64> {
    let m = cells;
    let mut v = vec![0.0; m + 2];
    for (j, slot) in v.iter_mut().enumerate() {
        *slot = (j as f64).powf(s);
    }
    let mut i0 = vec![0.0; m + 1];
    let mut jm = vec![0.0; m + 1];
    for k in 1..=m {
        let (a, b) = moments(s, k as f64, (k + 1) as f64);
        i0[k] = a;
        jm[k] = b - k as f64 * a;
    }
    let beta = 1.0 / (2.0 - 2.0 * s);
    par::map_indexed(n, |idx| {
        let i = idx + 1;
        let vi = v[i];
        let mut out = -(v[i + 1] - 2.0 * vi + v[i - 1]) * beta;
        for k in 1..i {
            // cell [i-k-1, i-k] on the boundary side
            out += (vi - v[i - k]) * i0[k] - (v[i - k - 1] - v[i - k]) * jm[k];
        }
        // exterior tail on the boundary side
        out += vi * (i as f64).powf(-2.0 * s) / (2.0 * s);
        for k in 1..m - i {
            out += (vi - v[i + k]) * i0[k] - (v[i + k + 1] - v[i + k]) * jm[k];
        }
        // analytic remainder of the unbounded side beyond the last cell
        let t = (m - i) as f64;
        out += vi * t.powf(-2.0 * s) / (2.0 * s)
            - (t.powf(-s) / s + s * i as f64 * t.powf(-1.0 - s) / (1.0 + s));
        out
    })
}

/// Assemble the dense matrix of `(-Delta)^s` with the exterior condition.
pub fn assemble_fraclap(grid: &Arc<Grid1D>, s: f64) -> Result<NonlocalOperator> {
    if !(s > 0.0 && s < 1.0) {
        return Err(invalid(format!("fractional order must lie in (0,1), got {s}")));
    }
    let n = grid.n();
    let h = grid.h();
    let c = const_c_ns(1, s)?;

    let mut i0 = vec![0.0; n + 1];
    let mut jm = vec![0.0; n + 1];
    for k in 1..=n {
        let (a, b) = moments(s, k as f64 * h, (k + 1) as f64 * h);
        i0[k] = a;
        jm[k] = (b - k as f64 * h * a) / h;
    }
    let beta = h.powf(-2.0 * s) / (2.0 - 2.0 * s);

    let mut band = vec![0.0; n + 1];
    band[1] = c * (jm[1] - i0[1] - beta);
    for k in 2..=n {
        band[k] = c * (jm[k] - i0[k] - jm[k - 1]);
    }

    let mut cum = vec![0.0; n + 1]; // cum[k] = sum_{m<=k} I0_m
    for k in 1..=n {
        cum[k] = cum[k - 1] + i0[k];
    }

    let cells = boundary_cells(n);
    let theta = boundary_model_errors(s, n, cells);

    let diag: Vec<f64> = (1..=n)
        .map(|i| {
            let dl = i as f64 * h;
            let dr = (n + 1 - i) as f64 * h;
            let tail = (dl.powf(-2.0 * s) + dr.powf(-2.0 * s)) / (2.0 * s);
            let base = c * (2.0 * beta + cum[i - 1] + cum[n - i] + tail);
            let corr = theta[i - 1] / (i as f64).powf(s)
                + theta[n - i] / ((n + 1 - i) as f64).powf(s);
            base - c * h.powf(-2.0 * s) * corr
        })
        .collect();

    let dense = Dense::from_band_diag(&band, &diag);
    let meta = AssemblyMeta {
        boundary_model_cells: cells,
        tail_analytic: true,
        wide_domain: grid.width() > 2.0,
    };
    Ok(NonlocalOperator::new(OperatorKind::FracLap { s }, grid.clone(), dense, meta))
}

fn boundary_cells(n: usize) -> usize {
    (4 * n).max(20_000)
}

#[cfg(test)]
pub(crate) mod oracle {
    //! Brute-force quadrature of the same collocation integral, written
    //! independently of the closed forms above. Used only by tests.

    use crate::grid::Grid1D;
    use crate::specialfn::const_c_ns;

    /// Evaluate row `i` of the base scheme (no boundary correction) on the
    /// nodal vector `u` by composite Gauss quadrature of the interpolant.
    pub fn row_action(grid: &Grid1D, s: f64, u: &[f64], i: usize) -> f64 {
        let n = grid.n();
        let h = grid.h();
        let a = grid.a();
        let xi = grid.node(i);
        let c = const_c_ns(1, s).unwrap();
        let node_val = |j: isize| -> f64 {
            if j <= 0 || j as usize > n {
                0.0
            } else {
                u[j as usize - 1]
            }
        };
        // 16-point Gauss-Legendre nodes/weights on [-1, 1]
        const GX: [f64; 8] = [
            0.095_012_509_837_637_44,
            0.281_603_550_779_258_9,
            0.458_016_777_657_227_4,
            0.617_876_244_402_643_7,
            0.755_404_408_355_003,
            0.865_631_202_387_831_7,
            0.944_575_023_073_232_6,
            0.989_400_934_991_649_9,
        ];
        const GW: [f64; 8] = [
            0.189_450_610_455_068_5,
            0.182_603_415_044_923_6,
            0.169_156_519_395_002_54,
            0.149_595_988_816_576_73,
            0.124_628_971_255_533_87,
            0.095_158_511_682_492_79,
            0.062_253_523_938_647_89,
            0.027_152_459_411_754_096,
        ];
        let mut total = 0.0;
        let ui = u[i];
        // all cells except the two adjacent to x_i: linear interpolant
        for cell in 0..=n as isize {
            if cell == i as isize || cell == i as isize + 1 {
                continue;
            }
            let y0 = a + cell as f64 * h;
            let vl = node_val(cell);
            let vr = node_val(cell + 1);
            let mid = y0 + 0.5 * h;
            let half = 0.5 * h;
            let mut acc = 0.0;
            for g in 0..8 {
                for sign in [-1.0, 1.0] {
                    let y = mid + sign * half * GX[g];
                    let t = (xi - y).abs();
                    let uy = vl + (vr - vl) * (y - y0) / h;
                    acc += GW[g] * half * (ui - uy) * t.powf(-1.0 - 2.0 * s);
                }
            }
            total += acc;
        }
        // adjacent cells: quadratic through the three nearest nodes, exact p.v.
        let up = node_val(i as isize + 2);
        let um = node_val(i as isize);
        total += -(up - 2.0 * ui + um) * h.powf(-2.0 * s) / (2.0 - 2.0 * s);
        // exterior tail
        let dl = xi - grid.a();
        let dr = grid.b() - xi;
        total += ui * (dl.powf(-2.0 * s) + dr.powf(-2.0 * s)) / (2.0 * s);
        c * total
    }
}
