//! Least-energy solvers on the Nehari manifold, Rayleigh-quotient
//! eigensolvers, and the mountain-pass structure check.
//!
//! Minimization runs projected gradient descent: step against the full
//! gradient, project back with the closed-form Nehari scaling, accept under
//! a monotone Armijo condition. Step lengths come from the Barzilai-Borwein
//! quotient, which keeps the iteration in the tens of iterations even for
//! the stiffer orders. Every run is deterministic in its options.

use crate::energy::{
    energy_log, energy_s, grad_energy_log, grad_energy_s, project_nehari_0, project_nehari_s,
    EnergyBreakdown, ProblemSpec,
};
use crate::error::{invalid, Error, Result};
use crate::grid::{dot, Grid1D, GridFunction};
use crate::ops::{assemble_fraclap, assemble_loglap, assemble_loglap_parts};
use crate::profile;
use std::sync::Arc;

/// Stopping and stepping controls for the Nehari descent.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SolverOptions {
    /// Relative gradient-norm stopping threshold.
    pub tol: f64,
    pub max_iter: usize,
    /// Step length of the first iteration (later steps are Barzilai-Borwein).
    pub step0: f64,
    /// Armijo sufficient-decrease coefficient.
    pub armijo: f64,
    /// Starting-point randomization; 0 keeps the plain bump start.
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-8, max_iter: 20_000, step0: 1.0, armijo: 1e-4, seed: 0 }
    }
}

impl SolverOptions {
    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.max_iter == 0 || !(self.step0 > 0.0) {
            return Err(invalid("solver options need tol > 0, max_iter >= 1, step0 > 0"));
        }
        if !(self.armijo > 0.0 && self.armijo < 1.0) {
            return Err(invalid("armijo coefficient must lie in (0,1)"));
        }
        Ok(())
    }
}

/// Outcome of a least-energy solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    /// Solution normalized to nonnegative mean.
    pub solution: GridFunction,
    pub energy: EnergyBreakdown,
    pub iterations: usize,
    pub converged: bool,
    /// Final relative gradient norm.
    pub residual: f64,
    /// All nodal values share one strict sign.
    pub sign_constant: bool,
    pub l2: f64,
    /// Near-field energy form value, the uniform-bound monitor.
    pub quadratic_form_e: f64,
}

struct Descent {
    values: Vec<f64>,
    iterations: usize,
    residual: f64,
    converged: bool,
}

/// Generic monotone BB-Armijo descent over a closed-form projection.
fn descend<P, G, J>(
    start: &GridFunction,
    opts: &SolverOptions,
    project: P,
    gradient: G,
    energy: J,
) -> Result<Descent>
where
    P: Fn(&GridFunction) -> Result<GridFunction>,
    G: Fn(&GridFunction) -> Result<GridFunction>,
    J: Fn(&GridFunction) -> Result<f64>,
{
    let grid = start.grid().clone();
    let h = grid.h();
    let mut u = project(start)?;
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None; // (u, g) of last accepted step
    let mut iterations = 0;

    while iterations < opts.max_iter {
        let g = gradient(&u)?;
        let gnorm = (h * dot(g.values(), g.values())).sqrt();
        let unorm = (h * dot(u.values(), u.values())).sqrt();
        let residual = gnorm / unorm.max(f64::MIN_POSITIVE);
        if residual <= opts.tol {
            return Ok(Descent { values: u.values().to_vec(), iterations, residual, converged: true });
        }

        let mut step = match &prev {
            Some((pu, pg)) => {
                let du: Vec<f64> = u.values().iter().zip(pu).map(|(a, b)| a - b).collect();
                let dg: Vec<f64> = g.values().iter().zip(pg).map(|(a, b)| a - b).collect();
                let denom = dot(&du, &dg);
                if denom > 0.0 {
                    (dot(&du, &du) / denom).clamp(1e-12, 1e6)
                } else {
                    opts.step0
                }
            }
            None => opts.step0,
        };

        let j0 = energy(&u)?;
        let decrease = opts.armijo * h * dot(g.values(), g.values());
        let mut accepted = None;
        while step >= 1e-16 {
            let trial: Vec<f64> = u
                .values()
                .iter()
                .zip(g.values())
                .map(|(a, b)| a - step * b)
                .collect();
            let trial = GridFunction::new(grid.clone(), trial)?;
            match project(&trial) {
                Ok(proj) => {
                    if energy(&proj)? <= j0 - decrease * step {
                        accepted = Some(proj);
                        break;
                    }
                }
                // a wild trial step can leave the projection domain; shrink
                Err(Error::DegenerateProjection(_)) | Err(Error::ZeroInput) => {}
                Err(e) => return Err(e),
            }
            step *= 0.5;
        }
        let Some(next) = accepted else {
            // line search stalled: no further monotone progress possible
            break;
        };
        prev = Some((u.values().to_vec(), g.values().to_vec()));
        u = next;
        iterations += 1;
    }

    let g = gradient(&u)?;
    let gnorm = (h * dot(g.values(), g.values())).sqrt();
    let unorm = (h * dot(u.values(), u.values())).sqrt();
    let residual = gnorm / unorm.max(f64::MIN_POSITIVE);
    Ok(Descent {
        values: u.values().to_vec(),
        iterations,
        residual,
        converged: residual <= opts.tol,
    })
}

/// Least-energy solution of the power problem at `spec.s`.
pub fn solve_least_energy_s(
    spec: &ProblemSpec,
    grid: &Arc<Grid1D>,
    opts: &SolverOptions,
) -> Result<SolveReport> {
    opts.validate()?;
    if !(spec.s > 0.0 && spec.s < 0.25) {
        return Err(invalid(format!("power problem needs s in (0, 1/4), got {}", spec.s)));
    }
    let op = assemble_fraclap(grid, spec.s)?;
    let start = profile::seeded_start(grid, opts.seed)?;
    let out = descend(
        &start,
        opts,
        |u| project_nehari_s(u, &op, spec),
        |u| grad_energy_s(u, &op, spec),
        |u| Ok(energy_s(u, &op, spec)?.total),
    )?;
    finish_report(grid, out, |u| energy_s(u, &op, spec))
}

/// Least-energy solution of the logarithmic limit problem.
pub fn solve_least_energy_log(
    mu: f64,
    grid: &Arc<Grid1D>,
    opts: &SolverOptions,
) -> Result<SolveReport> {
    opts.validate()?;
    let op = assemble_loglap(grid)?;
    let start = profile::seeded_start(grid, opts.seed)?;
    let out = descend(
        &start,
        opts,
        |u| project_nehari_0(u, &op, mu),
        |u| grad_energy_log(u, &op, mu),
        |u| Ok(energy_log(u, &op, mu)?.total),
    )?;
    finish_report(grid, out, |u| energy_log(u, &op, mu))
}

fn finish_report(
    grid: &Arc<Grid1D>,
    out: Descent,
    energy: impl Fn(&GridFunction) -> Result<EnergyBreakdown>,
) -> Result<SolveReport> {
    let solution = GridFunction::new(grid.clone(), out.values)?.nonneg_mean();
    let breakdown = energy(&solution)?;
    let near = assemble_loglap_parts(grid)?.near;
    let quadratic_form_e = near.quad_form(&solution, &solution)?;
    Ok(SolveReport {
        l2: solution.lp_norm(2.0)?,
        sign_constant: solution.sign_constant(),
        solution,
        energy: breakdown,
        iterations: out.iterations,
        converged: out.converged,
        residual: out.residual,
        quadratic_form_e,
    })
}

// ---------------------------------------------------------------------------
// dense symmetric smallest eigenpair by shifted inverse iteration

fn cholesky(n: usize, a: &[f64]) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i * n + j];
            for k in 0..j {
                sum -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if sum <= 0.0 {
                    return None;
                }
                l[i * n + i] = sum.sqrt();
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    Some(l)
}

fn chol_solve(n: usize, l: &[f64], b: &[f64]) -> Vec<f64> {
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[i * n + k] * y[k];
        }
        y[i] = sum / l[i * n + i];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut sum = y[i];
        for k in i + 1..n {
            sum -= l[k * n + i] * x[k];
        }
        x[i] = sum / l[i * n + i];
    }
    x
}

/// Smallest eigenpair of a dense symmetric matrix via inverse iteration
/// shifted below the Gershgorin lower bound.
pub(crate) fn smallest_eigenpair(n: usize, a: &[f64], start: &[f64]) -> Result<(f64, Vec<f64>)> {
    let mut lower = f64::INFINITY;
    for i in 0..n {
        let mut off = 0.0;
        for j in 0..n {
            if j != i {
                off += a[i * n + j].abs();
            }
        }
        lower = lower.min(a[i * n + i] - off);
    }
    let mut shift = lower - 1.0;
    let mut chol = None;
    for _ in 0..4 {
        let shifted: Vec<f64> = a
            .iter()
            .enumerate()
            .map(|(idx, &v)| if idx % (n + 1) == 0 { v - shift } else { v })
            .collect();
        chol = cholesky(n, &shifted);
        if chol.is_some() {
            break;
        }
        shift -= (lower.abs() + 1.0) * 2.0;
    }
    let l = chol.ok_or(Error::EigenNonConvergence(0))?;

    let mut v: Vec<f64> = start.to_vec();
    let norm = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    let max_iter = 500;
    for it in 0..max_iter {
        let w = chol_solve(n, &l, &v);
        let norm = dot(&w, &w).sqrt();
        let v_next: Vec<f64> = w.iter().map(|x| x / norm).collect();
        // Rayleigh quotient and residual for the unshifted matrix
        let mut av = vec![0.0; n];
        for i in 0..n {
            av[i] = dot(&a[i * n..(i + 1) * n], &v_next);
        }
        let lam = dot(&v_next, &av);
        let mut res = 0.0;
        for i in 0..n {
            let r = av[i] - lam * v_next[i];
            res += r * r;
        }
        let res = res.sqrt();
        v = v_next;
        if res <= 1e-10 * lam.abs().max(1.0) && it >= 2 {
            return Ok((lam, v));
        }
    }
    Err(Error::EigenNonConvergence(max_iter))
}

/// First Dirichlet eigenvalue and eigenfunction of the logarithmic
/// Laplacian: the minimizer of the Rayleigh quotient
/// `E_L(u,u) / |u|_2^2`, normalized to `|u|_2 = 1` and nonnegative mean.
pub fn first_eigen_loglap(grid: &Arc<Grid1D>, _opts: &SolverOptions) -> Result<(f64, GridFunction)> {
    let op = assemble_loglap(grid)?;
    let start = profile::bump(grid);
    let (lam, v) = smallest_eigenpair(grid.n(), &op.dense.data, start.values())?;
    let f = GridFunction::new(grid.clone(), v)?;
    let scale = 1.0 / f.lp_norm(2.0)?;
    Ok((lam, f.scaled(scale).nonneg_mean()))
}

/// First Dirichlet eigenvalue of `-d^2/dx^2` from the standard
/// second-difference matrix, computed by tridiagonal inverse iteration.
pub fn first_eigen_laplace(grid: &Arc<Grid1D>) -> Result<f64> {
    let n = grid.n();
    let h = grid.h();
    let diag = 2.0 / (h * h);
    let off = -1.0 / (h * h);
    // shift -1 keeps the matrix positive definite and the iteration aimed
    // at the smallest eigenvalue
    let shift = -1.0;
    let mut v: Vec<f64> = profile::bump(grid).values().to_vec();
    let nv = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|x| *x /= nv);
    let mut lam = 0.0;
    for _ in 0..200 {
        // Thomas solve of (T - shift I) w = v
        let d0 = diag - shift;
        let mut c = vec![0.0; n];
        let mut dp = vec![0.0; n];
        c[0] = off / d0;
        dp[0] = v[0] / d0;
        for i in 1..n {
            let m = d0 - off * c[i - 1];
            c[i] = off / m;
            dp[i] = (v[i] - off * dp[i - 1]) / m;
        }
        let mut w = vec![0.0; n];
        w[n - 1] = dp[n - 1];
        for i in (0..n - 1).rev() {
            w[i] = dp[i] - c[i] * w[i + 1];
        }
        let norm = dot(&w, &w).sqrt();
        w.iter_mut().for_each(|x| *x /= norm);
        // Rayleigh quotient of the tridiagonal matrix
        let mut num = 0.0;
        for i in 0..n {
            let mut t = diag * w[i];
            if i > 0 {
                t += off * w[i - 1];
            }
            if i + 1 < n {
                t += off * w[i + 1];
            }
            num += w[i] * t;
        }
        let old = lam;
        lam = num;
        v = w;
        if (lam - old).abs() <= 1e-12 * lam.abs() {
            return Ok(lam);
        }
    }
    Ok(lam)
}

// ---------------------------------------------------------------------------
// mountain-pass structure

/// Structure check along the ray path `t -> t r u0`.
#[derive(Debug, Clone, serde::Serialize)]
pub struct MountainPassReport {
    /// Ray endpoint factor with `J_0(r u0) < 0`, found by doubling.
    pub r: f64,
    /// Maximum of `J_0` along the path (parabolically refined).
    pub path_max: f64,
    /// `J_0(u0)`.
    pub ground_energy: f64,
    /// Relative gap between the two.
    pub rel_gap: f64,
    pub kappa_start: f64,
    pub kappa_end: f64,
    /// Grid cell where the kappa map crosses 1.
    pub kappa_cross_index: usize,
    /// Grid cell where the Nehari residual changes sign.
    pub residual_sign_change_index: usize,
    /// J along the path rises once and falls once.
    pub unimodal: bool,
}

const PATH_POINTS: usize = 512;

/// Verify the mountain-pass identity for a converged limit-problem ground
/// state: the max of `J_0` along `t -> t r u0` equals `J_0(u0)`, and the
/// kappa map crosses 1 exactly where the Nehari residual changes sign.
pub fn mountain_pass_check(u0: &SolveReport, mu: f64, opts: &SolverOptions) -> Result<MountainPassReport> {
    opts.validate()?;
    if !u0.converged {
        return Err(invalid("mountain-pass check needs a converged ground state"));
    }
    let grid = u0.solution.grid().clone();
    let op = assemble_loglap(&grid)?;
    let j = |v: &GridFunction| -> Result<f64> { Ok(energy_log(v, &op, mu)?.total) };
    let ground_energy = j(&u0.solution)?;

    let mut r = 1.0f64;
    let mut doublings = 0;
    while j(&u0.solution.scaled(r))? >= 0.0 {
        r *= 2.0;
        doublings += 1;
        if doublings > 60 {
            return Err(Error::PathSearch(
                "no negative-energy ray point within 60 doublings".into(),
            ));
        }
    }

    let dt = 1.0 / (PATH_POINTS - 1) as f64;
    let path: Vec<f64> = (0..PATH_POINTS)
        .map(|k| j(&u0.solution.scaled(k as f64 * dt * r)))
        .collect::<Result<_>>()?;

    // grid max plus one parabolic refinement
    let (mut kmax, mut path_max) = (0, f64::NEG_INFINITY);
    for (k, &v) in path.iter().enumerate() {
        if v > path_max {
            path_max = v;
            kmax = k;
        }
    }
    if kmax > 0 && kmax + 1 < PATH_POINTS {
        let (p0, p1, p2) = (path[kmax - 1], path[kmax], path[kmax + 1]);
        let den = p0 - 2.0 * p1 + p2;
        if den != 0.0 {
            let t_star = (kmax as f64 + 0.5 * (p0 - p2) / den) * dt;
            path_max = path_max.max(j(&u0.solution.scaled(t_star * r))?);
        }
    }

    let kappa = |v: &GridFunction| -> Result<f64> {
        let e = energy_log(v, &op, mu)?;
        let l2 = v.lp_norm(2.0)?;
        if l2 == 0.0 {
            return Ok(0.0);
        }
        // exp((mu int v^2 ln|v| - E_L(v,v)) / |v|_2^2) = exp(-residual / l2^2)
        Ok((-e.nehari_residual / (l2 * l2)).exp())
    };
    let kappa_start = kappa(&u0.solution.scaled(dt * r))?;
    let kappa_end = kappa(&u0.solution.scaled(r))?;

    let mut kappa_cross_index = 0;
    let mut residual_sign_change_index = 0;
    let mut prev_kappa = 0.0;
    let mut prev_res = f64::NEG_INFINITY;
    for k in 1..PATH_POINTS {
        let v = u0.solution.scaled(k as f64 * dt * r);
        let e = energy_log(&v, &op, mu)?;
        let kap = kappa(&v)?;
        if kappa_cross_index == 0 && k > 1 && (prev_kappa - 1.0) * (kap - 1.0) <= 0.0 && kap >= 1.0 {
            kappa_cross_index = k;
        }
        if residual_sign_change_index == 0 && k > 1 && prev_res > 0.0 && e.nehari_residual <= 0.0 {
            residual_sign_change_index = k;
        }
        prev_kappa = kap;
        prev_res = e.nehari_residual;
    }

    // one rise, one fall
    let mut changes = 0;
    let mut last_sign = 0i8;
    for w in path.windows(2) {
        let d = w[1] - w[0];
        if d == 0.0 {
            continue;
        }
        let sign = if d > 0.0 { 1 } else { -1 };
        if last_sign != 0 && sign != last_sign {
            changes += 1;
        }
        last_sign = sign;
    }

    Ok(MountainPassReport {
        r,
        path_max,
        ground_energy,
        rel_gap: (path_max - ground_energy).abs() / ground_energy.abs().max(f64::MIN_POSITIVE),
        kappa_start,
        kappa_end,
        kappa_cross_index,
        residual_sign_change_index,
        unimodal: changes == 1,
    })
}
