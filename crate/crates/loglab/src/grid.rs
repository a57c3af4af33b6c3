//! Uniform interior grids on an interval and nodal functions extended by
//! zero outside it. All integrals are composite-midpoint sums with weight
//! `h`, which keeps every discrete bilinear form symmetric.

use crate::error::{invalid, Error, Result};
use std::io::Write;
use std::sync::Arc;

/// Uniform discretization of `(a, b)` with `n` interior nodes
/// `x_i = a + i h`, `h = (b - a)/(n + 1)`. The endpoints themselves carry the
/// boundary value zero and are not stored.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid1D {
    a: f64,
    b: f64,
    n: usize,
    h: f64,
    nodes: Vec<f64>,
}

impl Grid1D {
    pub fn build(a: f64, b: f64, n: usize) -> Result<Grid1D> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(invalid(format!("need finite a < b, got ({a}, {b})")));
        }
        if n < 4 {
            return Err(invalid(format!("need at least 4 interior nodes, got {n}")));
        }
        let h = (b - a) / (n as f64 + 1.0);
        let nodes = (1..=n).map(|i| a + i as f64 * h).collect();
        Ok(Grid1D { a, b, n, h, nodes })
    }

    /// Convenience: build and wrap in an `Arc` for sharing.
    pub fn shared(a: f64, b: f64, n: usize) -> Result<Arc<Grid1D>> {
        Ok(Arc::new(Self::build(a, b, n)?))
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> f64 {
        self.nodes[i]
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }
}

/// Nodal values of a function on a [`Grid1D`], identically zero outside the
/// interval. Values are immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Arc<Grid1D>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Arc<Grid1D>, values: Vec<f64>) -> Result<GridFunction> {
        if values.len() != grid.n() {
            return Err(invalid(format!(
                "value count {} does not match grid size {}",
                values.len(),
                grid.n()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(invalid("grid function values must be finite"));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn zero(grid: Arc<Grid1D>) -> GridFunction {
        let n = grid.n();
        GridFunction { grid, values: vec![0.0; n] }
    }

    pub fn from_fn(grid: Arc<Grid1D>, f: impl Fn(f64) -> f64) -> Result<GridFunction> {
        let values: Vec<f64> = grid.nodes().iter().map(|&x| f(x)).collect();
        Self::new(grid, values)
    }

    pub fn grid(&self) -> &Arc<Grid1D> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub(crate) fn check_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.grid.as_ref() == other.grid.as_ref() {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// `(h sum |u_i|^p)^{1/p}`; `p = f64::INFINITY` gives the max norm.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        if p == f64::INFINITY {
            return Ok(self.values.iter().fold(0.0, |m, v| m.max(v.abs())));
        }
        if !(p >= 1.0) {
            return Err(invalid(format!("lp_norm requires p >= 1, got {p}")));
        }
        let h = self.grid.h();
        let sum: f64 = self.values.iter().map(|v| v.abs().powf(p)).sum();
        Ok((h * sum).powf(1.0 / p))
    }

    /// Discrete `int u v`: `h sum u_i v_i`.
    pub fn inner_l2(&self, other: &GridFunction) -> Result<f64> {
        self.check_same_grid(other)?;
        let h = self.grid.h();
        Ok(h * dot(&self.values, &other.values))
    }

    pub fn scaled(&self, c: f64) -> GridFunction {
        GridFunction {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| c * v).collect(),
        }
    }

    /// Mean of the nodal values (plain average, no quadrature weight).
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Flip sign so the mean is nonnegative.
    pub fn nonneg_mean(&self) -> GridFunction {
        if self.mean() < 0.0 {
            self.scaled(-1.0)
        } else {
            self.clone()
        }
    }

    /// True when every nodal value has the same strict sign.
    pub fn sign_constant(&self) -> bool {
        self.values.iter().all(|&v| v > 0.0) || self.values.iter().all(|&v| v < 0.0)
    }

    /// CSV with header `x,u`, one row per node, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,u")?;
        for (x, u) in self.grid.nodes().iter().zip(&self.values) {
            writeln!(w, "{x:.16e},{u:.16e}")?;
        }
        Ok(())
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn build_examples() {
        let g = Grid1D::build(-1.0, 1.0, 3).err().unwrap();
        assert!(matches!(g, Error::InvalidArgument(_)));

        let g = Grid1D::build(0.0, 1.0, 4).unwrap();
        let expect = [0.2, 0.4, 0.6, 0.8];
        for (got, want) in g.nodes().iter().zip(expect) {
            assert_relative_eq!(got, &want, epsilon = 1e-15);
        }

        let g = Grid1D::build(-1.0, 1.0, 511).unwrap();
        assert_relative_eq!(g.h(), 2.0 / 512.0, epsilon = 1e-16);
        // h (n+1) = b - a to machine precision
        assert_relative_eq!(g.h() * 512.0, 2.0, epsilon = 1e-14);
        assert!(g.nodes().windows(2).all(|w| w[0] < w[1]));
        assert!(g.nodes().iter().all(|&x| x > -1.0 && x < 1.0));

        assert!(Grid1D::build(1.0, 1.0, 8).is_err());
        assert!(Grid1D::build(1.0, -1.0, 8).is_err());
    }

    #[test]
    fn lp_norm_examples() {
        let g = Grid1D::shared(-1.0, 1.0, 200).unwrap();
        let ones = GridFunction::from_fn(g.clone(), |_| 1.0).unwrap();
        let expect = (2.0 * 200.0 / 201.0f64).sqrt();
        assert_relative_eq!(ones.lp_norm(2.0).unwrap(), expect, max_relative = 1e-14);

        let zero = GridFunction::zero(g.clone());
        assert_eq!(zero.lp_norm(1.0).unwrap(), 0.0);
        assert_eq!(zero.lp_norm(f64::INFINITY).unwrap(), 0.0);

        // |x|_2 on (-1,1) -> sqrt(2/3) at O(h^2)
        let lin = GridFunction::from_fn(g, |x| x).unwrap();
        assert_relative_eq!(
            lin.lp_norm(2.0).unwrap(),
            (2.0f64 / 3.0).sqrt(),
            max_relative = 1e-4
        );

        let g2 = Grid1D::shared(-1.0, 1.0, 8).unwrap();
        let u = GridFunction::from_fn(g2, |x| x).unwrap();
        assert!(u.lp_norm(0.5).is_err());
    }

    #[test]
    fn inner_l2_consistency() {
        let g = Grid1D::shared(-1.0, 1.0, 64).unwrap();
        let u = GridFunction::from_fn(g.clone(), |x| x * x).unwrap();
        let n2 = u.lp_norm(2.0).unwrap();
        assert_relative_eq!(u.inner_l2(&u).unwrap(), n2 * n2, max_relative = 1e-14);

        let z = GridFunction::zero(g.clone());
        assert_eq!(u.inner_l2(&z).unwrap(), 0.0);

        let other = Grid1D::shared(-1.0, 1.0, 65).unwrap();
        let v = GridFunction::zero(other);
        assert!(matches!(u.inner_l2(&v), Err(Error::GridMismatch)));
    }

    #[test]
    fn sine_modes_discretely_orthogonal() {
        let g = Grid1D::shared(-1.0, 1.0, 128).unwrap();
        let m1 = GridFunction::from_fn(g.clone(), |x| (std::f64::consts::PI * (x + 1.0) / 2.0).sin())
            .unwrap();
        let m3 = GridFunction::from_fn(g, |x| (3.0 * std::f64::consts::PI * (x + 1.0) / 2.0).sin())
            .unwrap();
        assert!(m1.inner_l2(&m3).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn holder_inequality_seeded() {
        let g = Grid1D::shared(-1.0, 1.0, 96).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1234);
        for _ in 0..100 {
            let u: Vec<f64> = (0..96).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let v: Vec<f64> = (0..96).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let ua = GridFunction::new(g.clone(), u.iter().map(|x| x.abs()).collect()).unwrap();
            let va = GridFunction::new(g.clone(), v.iter().map(|x| x.abs()).collect()).unwrap();
            let lhs = ua.inner_l2(&va).unwrap();
            let rhs = ua.lp_norm(2.0).unwrap() * va.lp_norm(2.0).unwrap();
            assert!(lhs <= rhs * (1.0 + 1e-12));
        }
    }

    #[test]
    fn csv_shape() {
        let g = Grid1D::shared(0.0, 1.0, 4).unwrap();
        let u = GridFunction::from_fn(g, |x| x).unwrap();
        let mut out = Vec::new();
        u.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "x,u");
        assert_eq!(lines.len(), 5);
        assert!(lines[1].starts_with("2.0000000000000001e-1,"));
    }

    proptest! {
        #[test]
        fn lp_norm_absolutely_homogeneous(c in -10.0f64..10.0, p in 1.0f64..6.0) {
            let g = Grid1D::shared(-1.0, 1.0, 32).unwrap();
            let u = GridFunction::from_fn(g, |x| (3.1 * x).sin() + 0.3).unwrap();
            let lhs = u.scaled(c).lp_norm(p).unwrap();
            let rhs = c.abs() * u.lp_norm(p).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
        }
    }
}
