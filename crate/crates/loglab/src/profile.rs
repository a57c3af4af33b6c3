//! Reference profiles: the smooth bump used as solver seed and test
//! function, and seeded random smooth profiles for the verification suites.

use crate::error::Result;
use crate::grid::{Grid1D, GridFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// `exp(-1/(1 - X^2))` mapped to the grid interval, zero at the endpoints to
/// all orders.
pub fn bump(grid: &Arc<Grid1D>) -> GridFunction {
    let (a, b) = (grid.a(), grid.b());
    GridFunction::from_fn(grid.clone(), |x| {
        let t = (2.0 * x - a - b) / (b - a);
        if t.abs() < 1.0 {
            (-1.0 / (1.0 - t * t)).exp()
        } else {
            0.0
        }
    })
    .expect("bump values are finite")
}

/// Random combination of the first eight sine modes, mollified by the bump
/// so it vanishes to all orders at the boundary. Deterministic in `seed`.
pub fn smooth_profile(grid: &Arc<Grid1D>, seed: u64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<f64> = (0..8)
        .map(|k| rng.gen_range(-1.0..1.0) / (k + 1) as f64)
        .collect();
    sine_combo(grid, &coeffs)
}

/// Same construction but with fast-decaying coefficients, concentrating the
/// profile on the lowest frequencies.
pub fn low_frequency_profile(grid: &Arc<Grid1D>, seed: u64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<f64> = (0..8)
        .map(|k| rng.gen_range(0.2..1.0) / ((k + 1) * (k + 1) * (k + 1)) as f64)
        .collect();
    sine_combo(grid, &coeffs)
}

fn sine_combo(grid: &Arc<Grid1D>, coeffs: &[f64]) -> GridFunction {
    let (a, w) = (grid.a(), grid.width());
    let moll = bump(grid);
    let values: Vec<f64> = grid
        .nodes()
        .iter()
        .zip(moll.values())
        .map(|(&x, &m)| {
            let phase = std::f64::consts::PI * (x - a) / w;
            let s: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c * ((k + 1) as f64 * phase).sin())
                .sum();
            3.0 * s * m
        })
        .collect();
    GridFunction::new(grid.clone(), values).expect("finite profile")
}

/// Bump plus a small seeded smooth perturbation; `seed = 0` returns the
/// plain bump. Used to randomize solver starting points.
pub fn seeded_start(grid: &Arc<Grid1D>, seed: u64) -> Result<GridFunction> {
    let base = bump(grid);
    if seed == 0 {
        return Ok(base);
    }
    let pert = smooth_profile(grid, seed);
    let scale = 0.05 * base.lp_norm(f64::INFINITY)?
        / pert.lp_norm(f64::INFINITY)?.max(f64::MIN_POSITIVE);
    let values: Vec<f64> = base
        .values()
        .iter()
        .zip(pert.values())
        .map(|(b, p)| b + scale * p)
        .collect();
    GridFunction::new(grid.clone(), values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bump_is_positive_inside_and_deterministic() {
        let g = Grid1D::shared(-1.0, 1.0, 64).unwrap();
        let b1 = bump(&g);
        let b2 = bump(&g);
        assert_eq!(b1.values(), b2.values());
        assert!(b1.values().iter().all(|&v| v > 0.0));
        assert!(b1.lp_norm(f64::INFINITY).unwrap() < (-1.0f64).exp() + 1e-12);
    }

    #[test]
    fn profiles_reproducible_and_seed_sensitive() {
        let g = Grid1D::shared(-1.0, 1.0, 64).unwrap();
        let p1 = smooth_profile(&g, 7);
        let p2 = smooth_profile(&g, 7);
        let p3 = smooth_profile(&g, 8);
        assert_eq!(p1.values(), p2.values());
        assert_ne!(p1.values(), p3.values());
    }

    #[test]
    fn seeded_start_zero_is_bump() {
        let g = Grid1D::shared(-1.0, 1.0, 32).unwrap();
        assert_eq!(seeded_start(&g, 0).unwrap().values(), bump(&g).values());
        assert_ne!(seeded_start(&g, 3).unwrap().values(), bump(&g).values());
    }
}
