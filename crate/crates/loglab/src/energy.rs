//! Energy functionals, Nehari residuals and projections, gradients, and the
//! logarithmic Sobolev gap.
//!
//! The superlinear problem minimizes `J_s(u) = 1/2 ||u||_s^2 - |u|_p^p / p`
//! over the Nehari set `||u||_s^2 = |u|_p^p`; its logarithmic limit
//! minimizes `J_0(u) = 1/2 E_L(u,u) - (mu/4) int u^2 (ln u^2 - 1)` over
//! `E_L(u,u) = mu int u^2 ln|u|`. Both Nehari projections are closed-form:
//! a power scaling for the former, an exponential for the latter.
//! Everywhere `0 ln 0 := 0`.

use crate::error::{invalid, Error, Result};
use crate::grid::GridFunction;
use crate::ops::{NonlocalOperator, OperatorKind};
use crate::specialfn::dimensional_constants;

/// Exponent family and dimension data of the power problem.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ProblemSpec {
    /// Space dimension; operators are assembled for 1 only.
    pub n_dim: u32,
    /// Convex-combination weight of the exponent family,
    /// `p(s) = lambda 2N/(N-2s) + (1-lambda) 2`.
    pub lambda: f64,
    /// `p'(0) = 4 lambda / N`, the coefficient of the limit nonlinearity.
    pub mu: f64,
    /// Fractional order in `(0, 1/4)`, or `0.0` for the limit problem.
    pub s: f64,
}

impl ProblemSpec {
    /// Spec for the fractional problem at order `s`.
    pub fn fractional(lambda: f64, s: f64) -> Result<ProblemSpec> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(invalid(format!("lambda must lie in (0,1), got {lambda}")));
        }
        if !(s > 0.0 && s < 0.25) {
            return Err(invalid(format!("s must lie in (0, 1/4), got {s}")));
        }
        Ok(ProblemSpec { n_dim: 1, lambda, mu: 4.0 * lambda, s })
    }

    /// Spec for the logarithmic limit problem with coefficient `mu`.
    pub fn logarithmic(mu: f64) -> Result<ProblemSpec> {
        if !(mu > 0.0 && mu < 4.0) {
            return Err(invalid(format!("mu must lie in (0, 4/N), got {mu}")));
        }
        Ok(ProblemSpec { n_dim: 1, lambda: mu / 4.0, mu, s: 0.0 })
    }

    /// `p(s) = lambda 2N/(N-2s) + (1-lambda) 2`.
    pub fn exponent(&self, s: f64) -> Result<f64> {
        let nf = f64::from(self.n_dim);
        if !(s >= 0.0 && s < nf / 2.0) {
            return Err(invalid(format!("exponent needs 0 <= s < N/2, got {s}")));
        }
        Ok(self.lambda * 2.0 * nf / (nf - 2.0 * s) + (1.0 - self.lambda) * 2.0)
    }
}

/// Split of an energy value into its quadratic and nonlinear parts.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct EnergyBreakdown {
    /// `1/2` of the operator quadratic form.
    pub quadratic: f64,
    /// Value of the nonlinear integral term.
    pub nonlinear: f64,
    /// `quadratic - nonlinear`.
    pub total: f64,
    /// Defect of Nehari membership (zero on the manifold).
    pub nehari_residual: f64,
}

fn expect_fraclap(op: &NonlocalOperator) -> Result<f64> {
    match op.kind() {
        OperatorKind::FracLap { s } => Ok(s),
        OperatorKind::LogLap => Err(Error::KindMismatch { expected: "fraclap" }),
    }
}

fn expect_loglap(op: &NonlocalOperator) -> Result<()> {
    match op.kind() {
        OperatorKind::LogLap => Ok(()),
        OperatorKind::FracLap { .. } => Err(Error::KindMismatch { expected: "loglap" }),
    }
}

fn check_mu(mu: f64) -> Result<()> {
    if !(mu > 0.0 && mu < 4.0) {
        return Err(invalid(format!("mu must lie in (0, 4/N), got {mu}")));
    }
    Ok(())
}

/// `h sum |u_i|^p`.
fn lp_pow(u: &GridFunction, p: f64) -> f64 {
    let h = u.grid().h();
    h * u.values().iter().map(|v| v.abs().powf(p)).sum::<f64>()
}

/// `h sum u_i^2 ln |u_i|` with `0 ln 0 = 0`.
fn entropy_ln(u: &GridFunction) -> f64 {
    let h = u.grid().h();
    h * u
        .values()
        .iter()
        .map(|&v| if v == 0.0 { 0.0 } else { v * v * v.abs().ln() })
        .sum::<f64>()
}

/// Energy of the power problem at the order of `op_s`.
pub fn energy_s(u: &GridFunction, op_s: &NonlocalOperator, spec: &ProblemSpec) -> Result<EnergyBreakdown> {
    let s = expect_fraclap(op_s)?;
    let p = spec.exponent(s)?;
    let q = op_s.quad_form(u, u)?;
    let upp = lp_pow(u, p);
    Ok(EnergyBreakdown {
        quadratic: 0.5 * q,
        nonlinear: upp / p,
        total: 0.5 * q - upp / p,
        nehari_residual: q - upp,
    })
}

/// Energy of the logarithmic limit problem.
pub fn energy_log(u: &GridFunction, op_log: &NonlocalOperator, mu: f64) -> Result<EnergyBreakdown> {
    expect_loglap(op_log)?;
    check_mu(mu)?;
    let q = op_log.quad_form(u, u)?;
    let h = u.grid().h();
    // u^2 (ln u^2 - 1) extended by 0 at u = 0
    let integral: f64 = u
        .values()
        .iter()
        .map(|&v| if v == 0.0 { 0.0 } else { v * v * ((v * v).ln() - 1.0) })
        .sum::<f64>()
        * h;
    let nonlinear = 0.25 * mu * integral;
    Ok(EnergyBreakdown {
        quadratic: 0.5 * q,
        nonlinear,
        total: 0.5 * q - nonlinear,
        nehari_residual: q - mu * entropy_ln(u),
    })
}

/// Gradient of `J_s` as a nodal function: `A u - |u|^{p-2} u`.
pub fn grad_energy_s(
    u: &GridFunction,
    op_s: &NonlocalOperator,
    spec: &ProblemSpec,
) -> Result<GridFunction> {
    let s = expect_fraclap(op_s)?;
    let p = spec.exponent(s)?;
    let au = op_s.apply(u)?;
    let values: Vec<f64> = au
        .values()
        .iter()
        .zip(u.values())
        .map(|(a, &v)| a - v.abs().powf(p - 2.0) * v)
        .collect();
    GridFunction::new(u.grid().clone(), values)
}

/// Gradient of `J_0`: `A_log u - mu u ln|u|` with `u ln|u| = 0` at `u = 0`.
pub fn grad_energy_log(
    u: &GridFunction,
    op_log: &NonlocalOperator,
    mu: f64,
) -> Result<GridFunction> {
    expect_loglap(op_log)?;
    check_mu(mu)?;
    let au = op_log.apply(u)?;
    let values: Vec<f64> = au
        .values()
        .iter()
        .zip(u.values())
        .map(|(a, &v)| if v == 0.0 { *a } else { a - mu * v * v.abs().ln() })
        .collect();
    GridFunction::new(u.grid().clone(), values)
}

/// Closed-form Nehari scaling factor of the power problem.
pub fn nehari_scale_s(u: &GridFunction, op_s: &NonlocalOperator, spec: &ProblemSpec) -> Result<f64> {
    let s = expect_fraclap(op_s)?;
    let p = spec.exponent(s)?;
    let upp = lp_pow(u, p);
    if upp == 0.0 {
        return Err(Error::ZeroInput);
    }
    let q = op_s.quad_form(u, u)?;
    Ok((q / upp).powf(1.0 / (p - 2.0)))
}

/// Project onto the Nehari set of the power problem: `t u` with
/// `t = (||u||_s^2 / |u|_p^p)^{1/(p-2)}`.
pub fn project_nehari_s(
    u: &GridFunction,
    op_s: &NonlocalOperator,
    spec: &ProblemSpec,
) -> Result<GridFunction> {
    Ok(u.scaled(nehari_scale_s(u, op_s, spec)?))
}

/// Closed-form Nehari scaling factor of the limit problem. The exponent is
/// clamped to `[-50, 50]`; values outside signal a degenerate input.
pub fn nehari_scale_0(w: &GridFunction, op_log: &NonlocalOperator, mu: f64) -> Result<f64> {
    expect_loglap(op_log)?;
    check_mu(mu)?;
    let l2sq = {
        let n = w.lp_norm(2.0)?;
        n * n
    };
    if l2sq == 0.0 {
        return Err(Error::ZeroInput);
    }
    let q = op_log.quad_form(w, w)?;
    let e = (q - mu * entropy_ln(w)) / (mu * l2sq);
    if !e.is_finite() || e.abs() > 50.0 {
        return Err(Error::DegenerateProjection(e));
    }
    Ok(e.exp())
}

/// Project onto the Nehari set of the limit problem: `t w` with
/// `t = exp((E_L(w,w) - mu int w^2 ln|w|) / (mu |w|_2^2))`.
pub fn project_nehari_0(
    w: &GridFunction,
    op_log: &NonlocalOperator,
    mu: f64,
) -> Result<GridFunction> {
    Ok(w.scaled(nehari_scale_0(w, op_log, mu)?))
}

/// Slack of the sharp logarithmic Sobolev inequality (nonnegative in the
/// continuum): `E_L(u,u) + (2/N) ln(|u|_2^2) |u|_2^2 + a_N |u|_2^2
/// - (2/N) int u^2 ln(u^2)`.
pub fn log_sobolev_gap(u: &GridFunction, op_log: &NonlocalOperator) -> Result<f64> {
    expect_loglap(op_log)?;
    let l2sq = {
        let n = u.lp_norm(2.0)?;
        n * n
    };
    if l2sq == 0.0 {
        return Err(Error::ZeroInput);
    }
    let a_n = dimensional_constants(1).expect("N = 1").a_n;
    let q = op_log.quad_form(u, u)?;
    // int u^2 ln(u^2) = 2 int u^2 ln|u|
    Ok(q + 2.0 * l2sq.ln() * l2sq + a_n * l2sq - 4.0 * entropy_ln(u))
}
