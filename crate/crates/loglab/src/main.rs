//! Command-line entry point.
//!
//! Subcommands: `solve-frac`, `solve-log`, `sweep`, `eigen`, `verify`,
//! `expand`. Exit codes: 0 success, 1 validation error, 2 assertion or
//! acceptance failure, 3 solver non-convergence. `LOGLAB_THREADS` caps the
//! worker count (0 or unset keeps the default).

use clap::{Parser, Subcommand, ValueEnum};
use loglab::config::RunConfig;
use loglab::energy::ProblemSpec;
use loglab::error::Error;
use loglab::experiment::{expansion_suite, inequality_suite, sweep_small_s};
use loglab::grid::Grid1D;
use loglab::solver::{
    first_eigen_laplace, first_eigen_loglap, mountain_pass_check, solve_least_energy_log,
    solve_least_energy_s, SolveReport,
};
use loglab::specialfn::{
    const_c_ns, const_kappa, dimensional_constants, kappa_small_s_limit, EULER_GAMMA,
};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "loglab", version, about = "Nonlocal-operator laboratory on an interval")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Configuration file (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Interior node count override.
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Solver seed override.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Print the effective configuration and exit.
    #[arg(long, global = true)]
    dump_config: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Least-energy solution of the fractional power problem.
    SolveFrac {
        #[arg(long)]
        s: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// Least-energy solution of the logarithmic limit problem, plus the
    /// mountain-pass structure check.
    SolveLog {
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
    },
    /// Small-order sweep of ground states.
    Sweep {
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, value_delimiter = ',')]
        s_list: Option<Vec<f64>>,
    },
    /// First Dirichlet eigenvalue.
    Eigen {
        #[arg(long, value_enum, default_value_t = Which::Loglap)]
        which: Which,
    },
    /// Verification suites.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Operator- and form-expansion study.
    Expand {
        #[arg(long, value_delimiter = ',')]
        s_list: Option<Vec<f64>>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Loglap,
    Laplace,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Constants,
    Inequalities,
    Expansion,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    init_threads();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn init_threads() {
    #[cfg(feature = "parallel")]
    if let Ok(v) = std::env::var("LOGLAB_THREADS") {
        if let Ok(k) = v.trim().parse::<usize>() {
            if k > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(k).build_global();
            }
        }
    }
}

fn effective_config(cli: &Cli) -> Result<RunConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(n) = cli.n {
        cfg.grid.n = n;
    }
    if let Some(seed) = cli.seed {
        cfg.solver.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output.dir = out.clone();
    }
    match &cli.cmd {
        Cmd::SolveFrac { s, lambda } => {
            if s.is_some() {
                cfg.problem.s = *s;
            }
            if lambda.is_some() {
                cfg.problem.lambda = *lambda;
                cfg.problem.mu = None;
            }
        }
        Cmd::SolveLog { mu, lambda } => {
            if mu.is_some() {
                cfg.problem.mu = *mu;
                cfg.problem.lambda = None;
            }
            if let Some(l) = lambda {
                cfg.problem.lambda = Some(*l);
                if mu.is_none() {
                    cfg.problem.mu = Some(4.0 * l);
                }
            }
        }
        Cmd::Sweep { lambda, s_list } => {
            if lambda.is_some() {
                cfg.problem.lambda = *lambda;
                cfg.problem.mu = None;
            }
            if s_list.is_some() {
                cfg.problem.s_list = s_list.clone();
            }
        }
        Cmd::Expand { s_list } => {
            if s_list.is_some() {
                cfg.problem.s_list = s_list.clone();
            }
        }
        _ => {}
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<u8, Error> {
    let cfg = effective_config(&cli)?;
    if cli.dump_config {
        print!("{}", cfg.dump());
        return Ok(0);
    }
    std::fs::create_dir_all(&cfg.output.dir)?;
    let grid = Grid1D::shared(cfg.domain.a, cfg.domain.b, cfg.grid.n)?;
    let opts = cfg.solver_options();

    match cli.cmd {
        Cmd::SolveFrac { .. } => {
            let s = cfg
                .problem
                .s
                .ok_or_else(|| Error::Config("solve-frac needs --s or problem.s".into()))?;
            let lambda = cfg
                .problem
                .lambda
                .ok_or_else(|| Error::Config("solve-frac needs --lambda or problem.lambda".into()))?;
            let spec = ProblemSpec::fractional(lambda, s)?;
            let rep = solve_least_energy_s(&spec, &grid, &opts)?;
            let csv = write_solution_csv(&cfg.output.dir, "solve_frac.csv", &rep)?;
            write_solve_json(
                &cfg.output.dir.join("solve_frac.json"),
                "fraclap",
                Some(s),
                spec.mu,
                &rep,
                &csv,
            )?;
            println!(
                "solve-frac s={s} lambda={lambda}: J={:.8e} iters={} residual={:.2e} sign_constant={}",
                rep.energy.total, rep.iterations, rep.residual, rep.sign_constant
            );
            Ok(if rep.converged { 0 } else { 3 })
        }
        Cmd::SolveLog { .. } => {
            let mu = cfg
                .problem
                .mu
                .ok_or_else(|| Error::Config("solve-log needs --mu, --lambda, or problem.mu".into()))?;
            let rep = solve_least_energy_log(mu, &grid, &opts)?;
            let csv = write_solution_csv(&cfg.output.dir, "solve_log.csv", &rep)?;
            write_solve_json(
                &cfg.output.dir.join("solve_log.json"),
                "loglap",
                None,
                mu,
                &rep,
                &csv,
            )?;
            println!(
                "solve-log mu={mu}: J={:.8e} iters={} residual={:.2e} sign_constant={}",
                rep.energy.total, rep.iterations, rep.residual, rep.sign_constant
            );
            if !rep.converged {
                return Ok(3);
            }
            let mp = mountain_pass_check(&rep, mu, &opts)?;
            let text = serde_json::to_string_pretty(&mp).expect("report serializes");
            std::fs::write(cfg.output.dir.join("mountain_pass.json"), text)?;
            println!(
                "mountain-pass: r={} path_max={:.8e} rel_gap={:.2e} kappa: {:.3} -> {:.3}",
                mp.r, mp.path_max, mp.rel_gap, mp.kappa_start, mp.kappa_end
            );
            let ok = mp.rel_gap <= 10.0 * opts.tol
                && mp.kappa_start < 1.0
                && mp.kappa_end > 1.0
                && mp.unimodal
                && mp.kappa_cross_index == mp.residual_sign_change_index;
            Ok(if ok { 0 } else { 2 })
        }
        Cmd::Sweep { .. } => {
            let lambda = cfg
                .problem
                .lambda
                .ok_or_else(|| Error::Config("sweep needs --lambda or problem.lambda".into()))?;
            let s_list = cfg
                .problem
                .s_list
                .clone()
                .unwrap_or_else(|| vec![0.2, 0.1, 0.05, 0.025, 0.0125]);
            let rep = sweep_small_s(lambda, &s_list, &grid, &opts)?;
            let mut csv = BufWriter::new(File::create(cfg.output.dir.join("sweep.csv"))?);
            rep.write_csv(&mut csv)?;
            csv.flush()?;
            let text = serde_json::to_string_pretty(&rep).expect("report serializes");
            std::fs::write(cfg.output.dir.join("sweep.json"), text)?;
            for r in &rep.rows {
                println!(
                    "s={:<8} l2_err={:.4e} Js/s={:.6} norm_s={:.6} iters={} sign_ok={}",
                    r.s, r.l2_err, r.js_over_s, r.norm_s, r.iterations, r.sign_ok
                );
            }
            println!(
                "limit: J0={:.6} l2_u0={:.6}; gaps: J {:.2}% / norm {:.2}%",
                rep.j0_limit,
                rep.l2_u0,
                100.0 * rep.checks.j_gap_rel,
                100.0 * rep.checks.norm_gap_rel
            );
            if !rep.checks.all_rows_converged {
                return Ok(3);
            }
            Ok(if rep.passed() { 0 } else { 2 })
        }
        Cmd::Eigen { which } => match which {
            Which::Loglap => {
                let (lam, ef) = first_eigen_loglap(&grid, &opts)?;
                let path = cfg.output.dir.join("eigen_loglap.csv");
                let mut w = BufWriter::new(File::create(&path)?);
                ef.write_csv(&mut w)?;
                w.flush()?;
                let mut doc = String::new();
                doc.push_str("{\n");
                doc.push_str("  \"which\": \"loglap\",\n");
                doc.push_str(&format!("  \"n\": {},\n", grid.n()));
                doc.push_str(&format!("  \"value\": {lam:.16e},\n"));
                doc.push_str(&format!(
                    "  \"eigenfunction_csv\": \"{}\",\n",
                    path.file_name().unwrap().to_string_lossy()
                ));
                doc.push_str(&format!("  \"sign_constant\": {}\n", ef.sign_constant()));
                doc.push_str("}\n");
                std::fs::write(cfg.output.dir.join("eigen.json"), doc)?;
                println!("lambda_1^L = {lam:.12}");
                Ok(0)
            }
            Which::Laplace => {
                let lam = first_eigen_laplace(&grid)?;
                let doc = format!(
                    "{{\n  \"which\": \"laplace\",\n  \"n\": {},\n  \"value\": {lam:.16e}\n}}\n",
                    grid.n()
                );
                std::fs::write(cfg.output.dir.join("eigen.json"), doc)?;
                println!("lambda_1 = {lam:.12}");
                Ok(0)
            }
        },
        Cmd::Verify { suite, samples } => match suite {
            Suite::Constants => {
                let (doc, ok) = constants_report()?;
                std::fs::write(cfg.output.dir.join("verify_constants.json"), &doc)?;
                print!("{doc}");
                Ok(if ok { 0 } else { 2 })
            }
            Suite::Inequalities => {
                let rep = inequality_suite(samples.unwrap_or(500), opts.seed.max(42), &grid)?;
                let text = serde_json::to_string_pretty(&rep).expect("report serializes");
                std::fs::write(cfg.output.dir.join("verify_inequalities.json"), text)?;
                println!(
                    "inequalities: {} samples, {} hard failures, min log-Sobolev gap {:.3e}",
                    rep.samples,
                    rep.hard_failures.len(),
                    rep.min_log_sobolev_gap_rel
                );
                Ok(if rep.passed { 0 } else { 2 })
            }
            Suite::Expansion => run_expansion(&cfg, &grid),
        },
        Cmd::Expand { .. } => run_expansion(&cfg, &grid),
    }
}

fn run_expansion(cfg: &RunConfig, grid: &Arc<Grid1D>) -> Result<u8, Error> {
    let s_list = cfg
        .problem
        .s_list
        .clone()
        .unwrap_or_else(|| vec![0.08, 0.04, 0.02, 0.01]);
    let rep = expansion_suite(grid, &s_list)?;
    let text = serde_json::to_string_pretty(&rep).expect("report serializes");
    std::fs::write(cfg.output.dir.join("expansion.json"), text)?;
    for r in &rep.rows {
        println!("s={:<8} E(s)={:.6e} ratio={:.3}", r.s, r.error, r.ratio);
    }
    println!("floor={:.3e} halving_ok={}", rep.floor, rep.halving_ok);
    Ok(if rep.halving_ok && rep.form_bound_ok && rep.sigma_norm_decreasing { 0 } else { 2 })
}

fn write_solution_csv(dir: &Path, name: &str, rep: &SolveReport) -> Result<String, Error> {
    let path = dir.join(name);
    let mut w = BufWriter::new(File::create(&path)?);
    rep.solution.write_csv(&mut w)?;
    w.flush()?;
    Ok(name.to_string())
}

fn write_solve_json(
    path: &Path,
    kind: &str,
    s: Option<f64>,
    mu: f64,
    rep: &SolveReport,
    csv_name: &str,
) -> Result<(), Error> {
    let mut doc = String::new();
    doc.push_str("{\n");
    doc.push_str(&format!("  \"kind\": \"{kind}\",\n"));
    match s {
        Some(s) => doc.push_str(&format!("  \"s\": {s:.16e},\n")),
        None => doc.push_str("  \"s\": null,\n"),
    }
    doc.push_str(&format!("  \"mu\": {mu:.16e},\n"));
    doc.push_str(&format!("  \"n\": {},\n", rep.solution.grid().n()));
    doc.push_str(&format!("  \"iterations\": {},\n", rep.iterations));
    doc.push_str(&format!("  \"converged\": {},\n", rep.converged));
    doc.push_str(&format!("  \"residual\": {:.16e},\n", rep.residual));
    doc.push_str(&format!("  \"J\": {:.16e},\n", rep.energy.total));
    doc.push_str(&format!("  \"nehari_residual\": {:.16e},\n", rep.energy.nehari_residual));
    doc.push_str(&format!("  \"l2\": {:.16e},\n", rep.l2));
    match s {
        Some(_) => doc.push_str(&format!(
            "  \"norm_s\": {:.16e},\n",
            (2.0 * rep.energy.quadratic).max(0.0).sqrt()
        )),
        None => doc.push_str("  \"norm_s\": null,\n"),
    }
    doc.push_str(&format!("  \"E_form\": {:.16e},\n", rep.quadratic_form_e));
    doc.push_str(&format!("  \"sign_constant\": {},\n", rep.sign_constant));
    doc.push_str(&format!("  \"solution_csv\": \"{csv_name}\"\n"));
    doc.push_str("}\n");
    std::fs::write(path, doc)?;
    Ok(())
}

fn constants_report() -> Result<(String, bool), Error> {
    let mut doc = String::new();
    let mut ok = true;
    doc.push_str("{\n");
    for n in 1..=6u32 {
        let c = dimensional_constants(n)?;
        doc.push_str(&format!("  \"c_{n}\": {:.16e},\n", c.c_n));
        doc.push_str(&format!("  \"rho_{n}\": {:.16e},\n", c.rho_n));
        doc.push_str(&format!("  \"a_{n}\": {:.16e},\n", c.a_n));
        doc.push_str(&format!("  \"d_{n}\": {:.16e},\n", c.d_n));
    }
    // closed-form identities
    let c1 = dimensional_constants(1)?;
    let rho1_ok = (c1.rho_n + 2.0 * EULER_GAMMA).abs() <= 1e-12;
    let rho2 = dimensional_constants(2)?.rho_n;
    let rho2_ok = (rho2 - (2.0 * 2f64.ln() - 2.0 * EULER_GAMMA)).abs() <= 1e-12;
    let a1_ok = (c1.a_n
        - 2.0 * (EULER_GAMMA + 2f64.ln() - std::f64::consts::PI.ln()))
    .abs()
        <= 1e-10;
    let d1_ok = (c1.d_n - (4.0 + 8.0 / std::f64::consts::PI)).abs() <= 1e-12;
    let chalf = const_c_ns(1, 0.5)?;
    let chalf_ok = (chalf - 1.0 / std::f64::consts::PI).abs() <= 1e-13;
    let limit = kappa_small_s_limit(1)?;
    let s_probe = 1e-4;
    let numeric = const_kappa(1, s_probe)?.powf(1.0 / s_probe);
    let kappa_rel = (numeric - limit).abs() / limit;
    let kappa_ok = kappa_rel <= 1e-3;
    ok &= rho1_ok && rho2_ok && a1_ok && d1_ok && chalf_ok && kappa_ok;
    doc.push_str(&format!("  \"rho_1_closed_form_ok\": {rho1_ok},\n"));
    doc.push_str(&format!("  \"rho_2_closed_form_ok\": {rho2_ok},\n"));
    doc.push_str(&format!("  \"a_1_closed_form_ok\": {a1_ok},\n"));
    doc.push_str(&format!("  \"d_1_closed_form_ok\": {d1_ok},\n"));
    doc.push_str(&format!("  \"c_ns_half_ok\": {chalf_ok},\n"));
    doc.push_str(&format!("  \"kappa_small_s_limit_1\": {limit:.16e},\n"));
    doc.push_str(&format!("  \"kappa_limit_rel_err\": {kappa_rel:.16e},\n"));
    doc.push_str(&format!("  \"kappa_limit_ok\": {kappa_ok},\n"));
    doc.push_str(&format!("  \"passed\": {ok}\n"));
    doc.push_str("}\n");
    Ok((doc, ok))
}
