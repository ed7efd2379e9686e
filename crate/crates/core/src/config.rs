use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tunables of the nonmonotone proximal gradient inner solver.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NpgParams {
    /// Lower clip of the initial step constant.
    pub l_min: f64,
    /// Clip the initial step constant by `(m/mu + 2/nu) lambda ||A||^2`.
    pub l_max_formula_enabled: bool,
    /// Backtracking growth factor.
    pub tau: f64,
    /// Sufficient-decrease constant.
    pub c: f64,
    /// Nonmonotone memory: compare against the max of the last `memory + 1` values.
    pub memory: usize,
    /// Cap on accepted steps per subproblem.
    pub iter_cap: usize,
    /// Cap on backtracking doublings per step.
    pub backtrack_cap: u32,
}

impl Default for NpgParams {
    fn default() -> Self {
        Self {
            l_min: 1e-6,
            l_max_formula_enabled: true,
            tau: 2.0,
            c: 1e-4,
            memory: 2,
            iter_cap: 1000,
            backtrack_cap: 60,
        }
    }
}

/// Tunables of the outer smoothing penalty loop.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub lambda0: f64,
    pub mu0: f64,
    pub nu0: f64,
    pub eps0: f64,
    /// Growth factor used while the progress measures are small.
    pub rho_fast: f64,
    /// Growth factor used otherwise.
    pub rho_slow: f64,
    /// Progress threshold selecting between the two growth factors.
    pub eta_switch: f64,
    pub outer_tol: f64,
    pub eps_floor: f64,
    pub outer_cap: usize,
    pub refine_threshold: f64,
    /// Relative singular-value cutoff used for rank decisions in reports.
    pub rank_tol: Option<f64>,
    pub npg: NpgParams,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            lambda0: 1.0,
            mu0: 1.0,
            nu0: 1.0,
            eps0: 1e-3,
            rho_fast: 1.2,
            rho_slow: 2.0,
            eta_switch: 1e-2,
            outer_tol: 1e-8,
            eps_floor: 1e-8,
            outer_cap: 500,
            refine_threshold: 1e-8,
            rank_tol: None,
            npg: NpgParams::default(),
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("lambda0", self.lambda0),
            ("mu0", self.mu0),
            ("nu0", self.nu0),
            ("eps0", self.eps0),
            ("outer_tol", self.outer_tol),
            ("eps_floor", self.eps_floor),
            ("l_min", self.npg.l_min),
            ("c", self.npg.c),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(format!("{name} = {v} must be positive")));
            }
        }
        if !(self.rho_fast > 1.0 && self.rho_slow > 1.0) {
            return Err(Error::param("penalty growth factors must exceed 1"));
        }
        if !(self.npg.tau > 1.0) {
            return Err(Error::param(format!(
                "tau = {} must exceed 1",
                self.npg.tau
            )));
        }
        if !(self.refine_threshold > 0.0 && self.refine_threshold < 1.0) {
            return Err(Error::param(format!(
                "refine_threshold = {} outside (0, 1)",
                self.refine_threshold
            )));
        }
        if self.npg.iter_cap == 0 || self.outer_cap == 0 {
            return Err(Error::param("iteration caps must be positive"));
        }
        Ok(())
    }
}
