//! Dense assembly and application of the nonlocal operators under the
//! exterior Dirichlet condition.
//!
//! Both operators are collocation discretizations acting on the continuous
//! piecewise-linear interpolant of the nodal values (zero at and beyond the
//! endpoints). Kernel integrals are evaluated cell by cell in closed form;
//! the principal value at the collocation node is handled by fitting the
//! three nearest values with a quadratic, whose odd part cancels exactly.
//! Exterior tails never need truncation because the function vanishes there.

mod fourier;
mod fraclap;
mod loglap;

pub use fourier::{fourier_form, FourierFormValue, FourierSymbol};
pub use fraclap::assemble_fraclap;
pub use loglap::{assemble_loglap, assemble_loglap_parts, LogLapParts};

use crate::error::{Error, Result};
use crate::grid::{dot, Grid1D, GridFunction};
use crate::par;
use std::io::Write;
use std::sync::Arc;

/// Which operator a dense matrix realizes.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub enum OperatorKind {
    FracLap { s: f64 },
    LogLap,
}

impl OperatorKind {
    pub fn s(&self) -> Option<f64> {
        match self {
            OperatorKind::FracLap { s } => Some(*s),
            OperatorKind::LogLap => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            OperatorKind::FracLap { .. } => "fraclap",
            OperatorKind::LogLap => "loglap",
        }
    }
}

/// Assembly metadata kept for reporting.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct AssemblyMeta {
    /// Virtual half-line cells used for the boundary-model correction
    /// (fractional Laplacian only; 0 otherwise).
    pub boundary_model_cells: usize,
    /// Exterior tails are closed-form; no truncation radius exists.
    pub tail_analytic: bool,
    /// Set when the interval is wider than 2, so that some unit balls lie
    /// entirely inside the domain (allowed, denser near field).
    pub wide_domain: bool,
}

/// Dense row-major symmetric matrix.
#[derive(Debug, Clone)]
pub(crate) struct Dense {
    pub(crate) n: usize,
    pub(crate) data: Vec<f64>,
}

impl Dense {
    pub(crate) fn from_band_diag(band: &[f64], diag: &[f64]) -> Dense {
        let n = diag.len();
        debug_assert!(band.len() >= n);
        let mut data = vec![0.0; n * n];
        par::fill_rows(&mut data, n, |i, row| {
            for (j, slot) in row.iter_mut().enumerate() {
                *slot = if i == j {
                    diag[i]
                } else {
                    band[i.abs_diff(j)]
                };
            }
        });
        Dense { n, data }
    }

    pub(crate) fn at(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub(crate) fn matvec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.n);
        let n = self.n;
        let data = &self.data;
        par::map_indexed(n, |i| dot(&data[i * n..(i + 1) * n], x))
    }

    pub(crate) fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    pub(crate) fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in 0..i {
                worst = worst.max((self.at(i, j) - self.at(j, i)).abs());
            }
        }
        worst
    }
}

/// A dense discretization of `(-Delta)^s` or of the logarithmic Laplacian.
#[derive(Debug, Clone)]
pub struct NonlocalOperator {
    kind: OperatorKind,
    grid: Arc<Grid1D>,
    pub(crate) dense: Dense,
    meta: AssemblyMeta,
}

impl NonlocalOperator {
    pub(crate) fn new(
        kind: OperatorKind,
        grid: Arc<Grid1D>,
        dense: Dense,
        meta: AssemblyMeta,
    ) -> NonlocalOperator {
        NonlocalOperator { kind, grid, dense, meta }
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn grid(&self) -> &Arc<Grid1D> {
        &self.grid
    }

    pub fn meta(&self) -> AssemblyMeta {
        self.meta
    }

    pub fn dim(&self) -> usize {
        self.dense.n
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.dense.at(i, j)
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.dense.max_abs()
    }

    pub fn max_asymmetry(&self) -> f64 {
        self.dense.max_asymmetry()
    }

    fn check_grid(&self, u: &GridFunction) -> Result<()> {
        if self.grid.as_ref() == u.grid().as_ref() {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Matrix-vector product as a grid function.
    pub fn apply(&self, u: &GridFunction) -> Result<GridFunction> {
        self.check_grid(u)?;
        GridFunction::new(self.grid.clone(), self.dense.matvec(u.values()))
    }

    /// Symmetric bilinear form `h v^T (A u)`.
    pub fn quad_form(&self, u: &GridFunction, v: &GridFunction) -> Result<f64> {
        self.check_grid(u)?;
        self.check_grid(v)?;
        let au = self.dense.matvec(u.values());
        Ok(self.grid.h() * dot(v.values(), &au))
    }

    /// Debugging dump: `i,j,value` triples, zero entries skipped.
    pub fn write_triples_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "i,j,a_ij")?;
        for i in 0..self.dense.n {
            for j in 0..self.dense.n {
                let v = self.dense.at(i, j);
                if v != 0.0 {
                    writeln!(w, "{i},{j},{v:.16e}")?;
                }
            }
        }
        Ok(())
    }
}

/// A symmetric kernel form without operator semantics (the near-field
/// energy form and the far-field kernel matrix of the log decomposition).
#[derive(Debug, Clone)]
pub struct EnergyForm {
    grid: Arc<Grid1D>,
    pub(crate) dense: Dense,
}

impl EnergyForm {
    pub fn grid(&self) -> &Arc<Grid1D> {
        &self.grid
    }

    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.dense.at(i, j)
    }

    pub fn apply(&self, u: &GridFunction) -> Result<GridFunction> {
        if self.grid.as_ref() != u.grid().as_ref() {
            return Err(Error::GridMismatch);
        }
        GridFunction::new(self.grid.clone(), self.dense.matvec(u.values()))
    }

    pub fn quad_form(&self, u: &GridFunction, v: &GridFunction) -> Result<f64> {
        if self.grid.as_ref() != u.grid().as_ref() || self.grid.as_ref() != v.grid().as_ref() {
            return Err(Error::GridMismatch);
        }
        let au = self.dense.matvec(u.values());
        Ok(self.grid.h() * dot(v.values(), &au))
    }
}

/// Double midpoint quadrature of `u(x) v(y) / |x - y|` over node pairs at
/// distance `>= 1`.
pub fn far_bilinear(u: &GridFunction, v: &GridFunction) -> Result<f64> {
    u.check_same_grid(v)?;
    let grid = u.grid();
    let h = grid.h();
    let nodes = grid.nodes();
    let uv = u.values();
    let vv = v.values();
    let rows = par::map_indexed(uv.len(), |i| {
        let xi = nodes[i];
        let mut acc = 0.0;
        for (j, &vj) in vv.iter().enumerate() {
            let d = (xi - nodes[j]).abs();
            if d >= 1.0 {
                acc += vj / d;
            }
        }
        uv[i] * acc
    });
    Ok(h * h * rows.iter().sum::<f64>())
}

#[cfg(test)]
mod tests;
