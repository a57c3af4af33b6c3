//! Run configuration: a flat sectioned key=value file (TOML carrier) plus
//! validation. The key paths are the stability surface; the CLI merges its
//! flag overrides into a loaded or default config before validation.

use crate::error::{Error, Result};
use crate::solver::SolverOptions;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DomainConfig {
    pub a: f64,
    pub b: f64,
}

impl Default for DomainConfig {
    fn default() -> Self {
        DomainConfig { a: -1.0, b: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridConfig {
    pub n: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { n: 512 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct ProblemConfig {
    pub lambda: Option<f64>,
    pub mu: Option<f64>,
    pub s: Option<f64>,
    pub s_list: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub step0: f64,
    pub armijo: f64,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let o = SolverOptions::default();
        SolverConfig { tol: o.tol, max_iter: o.max_iter, step0: o.step0, armijo: o.armijo, seed: o.seed }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { dir: PathBuf::from("loglab-out") }
    }
}

/// Complete run configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default)]
pub struct RunConfig {
    pub domain: DomainConfig,
    pub grid: GridConfig,
    pub problem: ProblemConfig,
    pub solver: SolverConfig,
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig =
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn dump(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.domain.a < self.domain.b) {
            return Err(Error::Config("domain.a must be smaller than domain.b".into()));
        }
        if self.grid.n < 4 {
            return Err(Error::Config("grid.n must be at least 4".into()));
        }
        if !(self.solver.tol > 0.0) || self.solver.max_iter == 0 || !(self.solver.step0 > 0.0) {
            return Err(Error::Config("solver.tol, solver.max_iter, solver.step0 must be positive".into()));
        }
        if let Some(lambda) = self.problem.lambda {
            if !(lambda > 0.0 && lambda < 1.0) {
                return Err(Error::Config("problem.lambda must lie in (0,1)".into()));
            }
            if let Some(mu) = self.problem.mu {
                if (mu - 4.0 * lambda).abs() > 1e-12 {
                    return Err(Error::Config(
                        "problem.mu and problem.lambda disagree: mu must equal 4 lambda / N".into(),
                    ));
                }
            }
        }
        if let Some(mu) = self.problem.mu {
            if !(mu > 0.0 && mu < 4.0) {
                return Err(Error::Config("problem.mu must lie in (0, 4/N)".into()));
            }
        }
        if let Some(s) = self.problem.s {
            if !(s > 0.0 && s < 0.25) {
                return Err(Error::Config("problem.s must lie in (0, 1/4)".into()));
            }
        }
        if let Some(list) = &self.problem.s_list {
            if list.is_empty() {
                return Err(Error::Config("problem.s_list must be nonempty".into()));
            }
            if list.iter().any(|&s| !(s > 0.0 && s < 0.25)) {
                return Err(Error::Config("every s in problem.s_list must lie in (0, 1/4)".into()));
            }
            if list.windows(2).any(|w| w[1] >= w[0]) {
                return Err(Error::Config("problem.s_list must be strictly decreasing".into()));
            }
        }
        Ok(())
    }

    pub fn solver_options(&self) -> SolverOptions {
        SolverOptions {
            tol: self.solver.tol,
            max_iter: self.solver.max_iter,
            step0: self.solver.step0,
            armijo: self.solver.armijo,
            seed: self.solver.seed,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_through_toml() {
        let mut cfg = RunConfig::default();
        cfg.problem.lambda = Some(0.25);
        cfg.problem.s_list = Some(vec![0.2, 0.1, 0.05]);
        cfg.solver.seed = 42;
        let text = cfg.dump();
        let back: RunConfig = toml::from_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn validation_catches_inconsistency() {
        let mut cfg = RunConfig::default();
        cfg.problem.lambda = Some(0.25);
        cfg.problem.mu = Some(1.0);
        assert!(cfg.validate().is_ok());
        cfg.problem.mu = Some(1.1);
        assert!(cfg.validate().is_err());
        cfg.problem.mu = None;
        cfg.problem.s = Some(0.3);
        assert!(cfg.validate().is_err());
        cfg.problem.s = Some(0.1);
        cfg.grid.n = 2;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn load_reports_parse_position() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.toml");
        std::fs::write(&path, "[domain]\na = \"oops\"\n").unwrap();
        let err = RunConfig::load(&path).unwrap_err();
        let msg = format!("{err}");
        assert!(msg.contains("bad.toml"), "{msg}");
    }
}
