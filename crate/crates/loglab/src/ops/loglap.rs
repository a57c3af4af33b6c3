//! Assembly of the logarithmic Laplacian and of its near/far decomposition.
//!
//! The matrix is the exact entrywise `s`-derivative at `s = 0` of the
//! fractional assembly, which is what makes the discrete operator expansion
//! `A_s = I + s A_log + o(s)` hold without a visible floor. The closed forms
//! collapse to log-kernel moments:
//!
//! * band entry `k >= 2`: `c_N [(k-1) ln(k/(k-1)) - (k+1) ln((k+1)/k)]`,
//!   which equals minus the exact hat-function integral of `1/|t|`;
//! * band entry `k = 1`: `c_N (1/2 - 2 ln 2)` (quadratic principal-value
//!   handling on the singular cells);
//! * diagonal: `c_N (1 - 2 ln h) + rho_N`, independent of the node because
//!   the interior log sums telescope against the exterior tail.
//!
//! `assemble_loglap_parts` produces the same operator split into the
//! near-field energy form (kernel support `|x - y| < 1`, realizing the
//! scalar product of the log-order Hilbert space) and the far-field kernel
//! matrix, so that `A_log = A_E - c_N B + rho_N I` holds entrywise.

use super::{AssemblyMeta, Dense, EnergyForm, NonlocalOperator, OperatorKind};
use crate::error::{invalid, Result};
use crate::grid::Grid1D;
use crate::specialfn::dimensional_constants;
use std::sync::Arc;

fn check_resolution(grid: &Grid1D) -> Result<()> {
    if grid.h() >= 0.5 {
        return Err(invalid(format!(
            "log-Laplacian assembly needs h < 1/2 (unit-ball split), got h = {}",
            grid.h()
        )));
    }
    Ok(())
}

fn band_and_diag(grid: &Grid1D) -> (Vec<f64>, Vec<f64>) {
    let n = grid.n();
    let h = grid.h();
    let consts = dimensional_constants(1).expect("N = 1");
    let c = consts.c_n;
    let mut band = vec![0.0; n + 1];
    band[1] = c * (0.5 - 2.0 * 2f64.ln());
    for (k, slot) in band.iter_mut().enumerate().skip(2) {
        let kf = k as f64;
        // (k-1) ln(k/(k-1)) - (k+1) ln((k+1)/k), in ln_1p form for accuracy
        *slot = c * ((kf - 1.0) * (-(-1.0 / kf).ln_1p()) - (kf + 1.0) * (1.0 / kf).ln_1p());
    }
    let diag = vec![c * (1.0 - 2.0 * h.ln()) + consts.rho_n; n];
    (band, diag)
}

/// Assemble the dense matrix of the logarithmic Laplacian with the exterior
/// condition.
pub fn assemble_loglap(grid: &Arc<Grid1D>) -> Result<NonlocalOperator> {
    check_resolution(grid)?;
    let (band, diag) = band_and_diag(grid);
    let dense = Dense::from_band_diag(&band, &diag);
    let meta = AssemblyMeta {
        boundary_model_cells: 0,
        tail_analytic: true,
        wide_domain: grid.width() > 2.0,
    };
    Ok(NonlocalOperator::new(OperatorKind::LogLap, grid.clone(), dense, meta))
}

/// Hat-function integral of `1/t` against the piece of the hat at offset
/// `k` clipped to `t` in `[lo, hi]`. The hat at distance `k h` has a rising
/// piece on `[(k-1)h, kh]` and a falling piece on `[kh, (k+1)h]`.
fn hat_log_integral(k: usize, h: f64, lo: f64, hi: f64) -> f64 {
    let kf = k as f64;
    let mut total = 0.0;
    // rising piece, weight (t - (k-1)h)/h
    let (mut t0, mut t1) = ((kf - 1.0) * h, kf * h);
    t0 = t0.max(lo);
    t1 = t1.min(hi);
    if t1 > t0 && t0 > 0.0 {
        total += ((t1 - t0) - (kf - 1.0) * h * (t1 / t0).ln()) / h;
    } else if t1 > t0 && k == 1 {
        // rising piece of the nearest hat starts at t = 0 with weight t/h
        total += (t1 - t0) / h;
    }
    // falling piece, weight ((k+1)h - t)/h
    let (mut t0, mut t1) = (kf * h, (kf + 1.0) * h);
    t0 = t0.max(lo);
    t1 = t1.min(hi);
    if t1 > t0 {
        total += ((kf + 1.0) * h * (t1 / t0).ln() - (t1 - t0)) / h;
    }
    total
}

/// The near/far split of the logarithmic Laplacian.
pub struct LogLapParts {
    /// Near-field form: realizes the scalar product over `|x - y| < 1`,
    /// including the closed-form exterior portion of each unit ball.
    pub near: EnergyForm,
    /// Far-field kernel matrix `B` with `(Bu)_i ~ int_{|x_i-y|>=1} u(y)/|x_i-y|`.
    pub far: EnergyForm,
}

/// Assemble the near-field energy form and the far-field kernel matrix.
pub fn assemble_loglap_parts(grid: &Arc<Grid1D>) -> Result<LogLapParts> {
    check_resolution(grid)?;
    let n = grid.n();
    let h = grid.h();
    let consts = dimensional_constants(1).expect("N = 1");
    let c = consts.c_n;

    let mut near_band = vec![0.0; n + 1];
    let mut far_band = vec![0.0; n + 1];
    for k in 1..=n {
        let near_hat = if k == 1 {
            // singular cells handled by the quadratic fit; only the falling
            // piece beyond t = h remains
            0.5 + hat_log_integral(1, h, h, 1.0)
        } else {
            hat_log_integral(k, h, 0.0, 1.0)
        };
        near_band[k] = -c * near_hat;
        far_band[k] = hat_log_integral(k, h, 1.0, f64::INFINITY);
    }
    let near_diag = vec![c * (1.0 - 2.0 * h.ln()); n];
    let far_diag = vec![0.0; n];

    Ok(LogLapParts {
        near: EnergyForm {
            grid: grid.clone(),
            dense: Dense::from_band_diag(&near_band, &near_diag),
        },
        far: EnergyForm {
            grid: grid.clone(),
            dense: Dense::from_band_diag(&far_band, &far_diag),
        },
    })
}
