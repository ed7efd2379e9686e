//! Smoothing penalty outer loop.
//!
//! Each outer iteration approximately minimizes
//! `||x||_p^p + lambda g_mu(H_nu(Ax - b) - sigma)` with NPG, then grows `lambda` by
//! `rho` and shrinks `mu`, `nu` and the inner tolerance by `1/rho`. Inner solves start
//! from the previous iterate unless the feasible anchor has a smaller objective.
//!
//! The q = 2 baseline uses the same scaffold with `lambda g_mu(||Ax - b||^2 - sigma^2)`.

use std::time::Instant;

use log::{debug, info};
use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::instance::{validate_instance, Norm, ProblemInstance, SupportSet};
use crate::linalg::{least_squares_min_norm, spectral_norm_sq};
use crate::npg::{CompositeProblem, NpgOutcome, NpgRecord, StopReason as InnerStop};
use crate::smoothing::{g_eval, phi_unchecked, L1SmoothPenalty, ResidualPenalty, SmoothingParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "spel1")]
    Spel1,
    /// Penalizes `||Ax - b||_2^2 - sigma^2`; a comparison baseline.
    #[serde(rename = "spel2-style")]
    Spel2Style,
}

impl Method {
    pub fn label(self) -> &'static str {
        match self {
            Method::Spel1 => "spel1",
            Method::Spel2Style => "spel2-style",
        }
    }

    /// Residual norm the constraint is posed in.
    pub fn norm(self) -> Norm {
        match self {
            Method::Spel1 => Norm::L1,
            Method::Spel2Style => Norm::L2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Converged,
    /// Stopped by the outer-iteration cap.
    OuterCap,
}

/// Progress measures between two consecutive outer iterates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Etas {
    /// Relative step.
    pub eta1: f64,
    /// Relative change of `||x||_p^p`.
    pub eta2: f64,
    /// Constraint violation.
    pub eta3: f64,
}

impl Etas {
    pub fn max(&self) -> f64 {
        self.eta1.max(self.eta2).max(self.eta3)
    }
}

/// One outer iteration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OuterRecord {
    pub k: usize,
    pub lambda: f64,
    pub mu: f64,
    pub nu: f64,
    pub eps: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub eta3: f64,
    /// Smoothed objective at the new iterate.
    pub objective: f64,
    pub phi: f64,
    /// Whether the inner solve restarted from the feasible anchor.
    pub restarted: bool,
    pub inner_iters: usize,
    pub inner_stop: InnerStop,
    pub stationarity_bound: f64,
    /// Growth factor applied after this iteration; 1 on the last one.
    pub rho: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveReport {
    pub method: Method,
    pub p: f64,
    pub x_star: Vec<f64>,
    /// `||x_star||_p^p`.
    pub objective: f64,
    pub support: SupportSet,
    pub l1_residual: f64,
    pub l2_residual: f64,
    pub sigma: f64,
    pub eta1: f64,
    pub eta2: f64,
    /// Violation in the method's residual norm at `x_star`.
    pub eta3: f64,
    pub outer_iters: usize,
    pub inner_iters_total: usize,
    /// Seconds, excluding the computation of the feasible start.
    pub wall_time: f64,
    pub status: SolveStatus,
    pub trace: Vec<OuterRecord>,
    /// Inner records tagged with their outer index; empty unless requested.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub inner_trace: Vec<(usize, NpgRecord)>,
}

impl SolveReport {
    pub fn x(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.x_star)
    }

    pub fn nnz(&self) -> usize {
        self.support.len()
    }
}

#[derive(Clone, Debug, Default)]
pub struct SolveOptions {
    /// Feasible starting point; the minimum-norm least-squares solution otherwise.
    pub seed_x: Option<DVector<f64>>,
    pub record_inner: bool,
}

/// `(eta1, eta2, eta3)` with the constraint measured in the l1 norm.
pub fn compute_etas(x_next: &DVector<f64>, x_curr: &DVector<f64>, inst: &ProblemInstance) -> Etas {
    etas_in(x_next, x_curr, inst, Norm::L1)
}

fn etas_in(x_next: &DVector<f64>, x_curr: &DVector<f64>, inst: &ProblemInstance, q: Norm) -> Etas {
    let phi_next = phi_unchecked(x_next.as_slice(), inst.p);
    let phi_curr = phi_unchecked(x_curr.as_slice(), inst.p);
    Etas {
        eta1: (x_next - x_curr).norm() / (1.0 + x_next.norm()),
        eta2: (phi_next - phi_curr).abs() / (1.0 + phi_next),
        eta3: (inst.residual_norm(x_next, q) - inst.sigma).max(0.0),
    }
}

/// Zeros every coordinate with `|x_i| / ||x||_inf < threshold`.
pub fn refine(x: &DVector<f64>, threshold: f64) -> DVector<f64> {
    let top = x.amax();
    if top == 0.0 {
        return DVector::zeros(x.len());
    }
    x.map(|v| if v.abs() / top < threshold { 0.0 } else { v })
}

/// `lambda * g_mu(||r||_2^2 - sigma^2)`.
#[derive(Clone, Copy, Debug)]
pub struct L2SmoothPenalty {
    pub sigma: f64,
    pub lambda: f64,
    pub mu: f64,
}

impl ResidualPenalty for L2SmoothPenalty {
    fn value(&self, r: &DVector<f64>) -> f64 {
        self.lambda * g_eval(r.norm_squared() - self.sigma * self.sigma, self.mu).0
    }

    fn value_and_residual_grad(&self, r: &DVector<f64>) -> (f64, DVector<f64>) {
        let (g, gp) = g_eval(r.norm_squared() - self.sigma * self.sigma, self.mu);
        (self.lambda * g, r * (2.0 * self.lambda * gp))
    }

    /// The Hessian is `lambda (2 g' A^T A + 4 g'' A^T r r^T A)` and `g'' = 1/mu` only
    /// where `||r||^2 < sigma^2 + mu/2`.
    fn step_cap(&self, _m: usize, a_norm_sq: f64) -> f64 {
        4.0 * self.lambda * a_norm_sq * (1.0 + self.sigma * self.sigma / self.mu)
    }
}

fn penalty_for(method: Method, sigma: f64, sp: SmoothingParams) -> Box<dyn ResidualPenalty> {
    match method {
        Method::Spel1 => Box::new(L1SmoothPenalty { sigma, params: sp }),
        Method::Spel2Style => Box::new(L2SmoothPenalty {
            sigma,
            lambda: sp.lambda,
            mu: sp.mu,
        }),
    }
}

impl ResidualPenalty for Box<dyn ResidualPenalty> {
    fn value(&self, r: &DVector<f64>) -> f64 {
        (**self).value(r)
    }
    fn value_and_residual_grad(&self, r: &DVector<f64>) -> (f64, DVector<f64>) {
        (**self).value_and_residual_grad(r)
    }
    fn step_cap(&self, m: usize, a_norm_sq: f64) -> f64 {
        (**self).step_cap(m, a_norm_sq)
    }
}

/// Feasible start: the seed if given, else `A^+ b`.
pub fn feasible_start(
    inst: &ProblemInstance,
    q: Norm,
    seed_x: Option<&DVector<f64>>,
) -> Result<DVector<f64>> {
    let x = match seed_x {
        Some(x) => {
            if x.len() != inst.n() {
                return Err(Error::DimensionMismatch(format!(
                    "seed has length {}, n = {}",
                    x.len(),
                    inst.n()
                )));
            }
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("seed"));
            }
            x.clone()
        }
        None => least_squares_min_norm(&inst.a, &inst.b)?,
    };
    let residual = inst.residual_norm(&x, q);
    if residual > inst.sigma + 1e-10 * (1.0 + q.of(inst.b.as_slice())) {
        return Err(Error::InfeasibleStart {
            residual,
            sigma: inst.sigma,
        });
    }
    Ok(x)
}

/// Smoothing penalty method for `min ||x||_p^p s.t. ||Ax - b||_1 <= sigma`.
pub fn spel1_solve(
    inst: &ProblemInstance,
    cfg: &SolverConfig,
    seed_x: Option<&DVector<f64>>,
) -> Result<SolveReport> {
    let opts = SolveOptions {
        seed_x: seed_x.cloned(),
        record_inner: false,
    };
    solve_with(Method::Spel1, inst, cfg, &opts)
}

/// The same scheme for `min ||x||_p^p s.t. ||Ax - b||_2 <= sigma`.
pub fn spel2_solve(inst: &ProblemInstance, cfg: &SolverConfig) -> Result<SolveReport> {
    solve_with(Method::Spel2Style, inst, cfg, &SolveOptions::default())
}

pub fn solve_with(
    method: Method,
    inst: &ProblemInstance,
    cfg: &SolverConfig,
    opts: &SolveOptions,
) -> Result<SolveReport> {
    cfg.validate()?;
    let q = method.norm();
    validate_instance(inst, q)?;
    if !(inst.p > 0.0 && inst.p < 1.0) {
        return Err(Error::param(format!("p = {} outside (0, 1)", inst.p)));
    }
    let x_feas = feasible_start(inst, q, opts.seed_x.as_ref())?;
    let a_norm_sq = spectral_norm_sq(&inst.a);
    let start = Instant::now();

    let (mut lambda, mut mu, mut nu, mut eps) = (cfg.lambda0, cfg.mu0, cfg.nu0, cfg.eps0);
    let mut x = x_feas.clone();
    let mut x_before = x_feas.clone();
    let mut trace = Vec::new();
    let mut inner_trace = Vec::new();
    let mut inner_total = 0;
    let mut status = SolveStatus::OuterCap;
    // F_{k-1}(x_feas) / lambda_{k-1}, bounding the violation of x^k
    let mut violation_bound = f64::INFINITY;

    for k in 0..cfg.outer_cap {
        let sp = SmoothingParams::new(lambda, mu, nu)?;
        let penalty = penalty_for(method, inst.sigma, sp);
        let problem = CompositeProblem {
            a: &inst.a,
            b: &inst.b,
            penalty: &penalty,
            p: inst.p,
        };
        let f_feas = problem.objective(&x_feas);
        let f_x = problem.objective(&x);
        let restarted = f_x > f_feas;
        let x0 = if restarted { x_feas.clone() } else { x.clone() };
        let out: NpgOutcome = problem.minimize(x0, eps, &cfg.npg, a_norm_sq, opts.record_inner)?;
        inner_total += out.iters;
        if opts.record_inner {
            inner_trace.extend(out.trace.iter().map(|r| (k, *r)));
        }

        // the last accepted point; taking x_final instead makes x^{k+1} = x^k whenever the
        // inner solve stops on its first step, which ends the outer loop spuriously
        let x_next = out.x_post;
        let etas = etas_in(&x_next, &x, inst, q);
        let phi = phi_unchecked(x_next.as_slice(), inst.p);
        debug_assert!(
            phi <= f_feas * (1.0 + 1e-12) + 1e-12,
            "objective anchor violated: {phi} > {f_feas}"
        );
        debug_assert!(
            etas.eta3 <= violation_bound * (1.0 + 1e-9) + 1e-12,
            "violation {} above bound {violation_bound}",
            etas.eta3
        );
        violation_bound = f_feas / lambda;

        let done = etas.max() < cfg.outer_tol;
        let rho = if done {
            1.0
        } else if etas.max() < cfg.eta_switch {
            cfg.rho_fast
        } else {
            cfg.rho_slow
        };
        debug!(
            "outer {k}: lambda={lambda:.3e} mu={mu:.3e} eps={eps:.1e} inner={} ({:?}) etas=({:.2e}, {:.2e}, {:.2e})",
            out.iters, out.stop_reason, etas.eta1, etas.eta2, etas.eta3
        );
        trace.push(OuterRecord {
            k,
            lambda,
            mu,
            nu,
            eps,
            eta1: etas.eta1,
            eta2: etas.eta2,
            eta3: etas.eta3,
            objective: out.f_final,
            phi,
            restarted,
            inner_iters: out.iters,
            inner_stop: out.stop_reason,
            stationarity_bound: out.stationarity_bound,
            rho,
        });
        x_before = std::mem::replace(&mut x, x_next);
        if done {
            status = SolveStatus::Converged;
            break;
        }
        let theta = 1.0 / rho;
        lambda *= rho;
        mu *= theta;
        nu *= theta;
        eps = (theta * eps).max(cfg.eps_floor);
    }
    let wall_time = start.elapsed().as_secs_f64();

    let x_star = refine(&x, cfg.refine_threshold);
    let final_etas = etas_in(&x_star, &x_before, inst, q);
    let report = SolveReport {
        method,
        p: inst.p,
        objective: phi_unchecked(x_star.as_slice(), inst.p),
        support: SupportSet::of(x_star.as_slice()),
        l1_residual: inst.residual_norm(&x_star, Norm::L1),
        l2_residual: inst.residual_norm(&x_star, Norm::L2),
        sigma: inst.sigma,
        eta1: final_etas.eta1,
        eta2: final_etas.eta2,
        eta3: final_etas.eta3,
        outer_iters: trace.len(),
        inner_iters_total: inner_total,
        wall_time,
        status,
        trace,
        inner_trace,
        x_star: x_star.as_slice().to_vec(),
    };
    info!(
        "{} finished: {:?} after {} outer / {} inner iterations, nnz = {}, {:.2}s",
        method.label(),
        report.status,
        report.outer_iters,
        report.inner_iters_total,
        report.nnz(),
        report.wall_time
    );
    Ok(report)
}

/// Writes the outer trace as CSV.
pub fn write_outer_trace<W: std::io::Write>(records: &[OuterRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn etas_trivial_cases() {
        let inst = ProblemInstance::example_2x3(0.5);
        let x = DVector::from_vec(vec![2.5, 0.0, 0.0]);
        assert_eq!(compute_etas(&x, &x, &inst).max(), 0.0);

        let zero = DVector::zeros(3);
        let e1 = DVector::from_vec(vec![1.0, 0.0, 0.0]);
        let big_sigma = inst.with_sigma(10.0);
        let e = compute_etas(&e1, &zero, &big_sigma);
        assert_eq!((e.eta1, e.eta2, e.eta3), (0.5, 0.5, 0.0));

        // residual (-0.45, -0.45): l1 norm 0.9 = sigma + 0.1 with sigma = 0.8
        let x = DVector::from_vec(vec![2.55, 0.0, 0.0]);
        let e = compute_etas(&x, &x, &inst.with_sigma(0.8));
        assert!((e.eta3 - 0.1).abs() < 1e-12);
    }

    #[test]
    fn refine_rule() {
        let x = DVector::from_vec(vec![1.0, 1e-12, 0.5]);
        assert_eq!(refine(&x, 1e-8), DVector::from_vec(vec![1.0, 0.0, 0.5]));
        assert_eq!(refine(&DVector::zeros(4), 1e-8), DVector::zeros(4));
        let flat = DVector::from_element(3, -0.25);
        assert_eq!(refine(&flat, 1e-8), flat);
        let once = refine(&x, 1e-8);
        assert_eq!(refine(&once, 1e-8), once);
    }

    #[test]
    fn infeasible_seed_is_rejected() {
        let inst = ProblemInstance::example_2x3(0.5);
        let seed = DVector::zeros(3);
        assert!(matches!(
            spel1_solve(&inst, &SolverConfig::default(), Some(&seed)),
            Err(Error::InfeasibleStart { .. })
        ));
    }

    #[test]
    fn example_solution() {
        let inst = ProblemInstance::example_2x3(0.5);
        // feasible: residual (-0.1, -0.1)
        let seed = DVector::from_vec(vec![2.0, 0.9, 0.0]);
        let rep = spel1_solve(&inst, &SolverConfig::default(), Some(&seed)).unwrap();
        assert_eq!(rep.status, SolveStatus::Converged);
        assert_eq!(rep.nnz(), 1, "{:?}", rep.x_star);
        let j = rep.support.indices()[0];
        assert!(j < 2);
        assert!((rep.x_star[j].abs() - 2.5).abs() < 1e-4, "{:?}", rep.x_star);
        assert!((rep.l1_residual - 1.0).abs() < 1e-6, "{}", rep.l1_residual);
    }

    #[test]
    fn example_from_least_squares_start_stays_symmetric() {
        // A^+ b = (1.5, 1.5, 0) and swapping x1, x2 leaves the problem unchanged, so the
        // iterates stay on x1 = x2 and end at the symmetric stationary point on the boundary
        let inst = ProblemInstance::example_2x3(0.5);
        let rep = spel1_solve(&inst, &SolverConfig::default(), None).unwrap();
        assert_eq!(rep.status, SolveStatus::Converged);
        assert_eq!(rep.support.indices(), &[0, 1]);
        assert!((rep.x_star[0] - rep.x_star[1]).abs() < 1e-9);
        assert!((rep.x_star[0] - 1.25).abs() < 1e-2, "{:?}", rep.x_star);
        assert!((rep.l1_residual - 1.0).abs() < 1e-6, "{}", rep.l1_residual);
    }

    #[test]
    fn schedule_invariants() {
        let inst = ProblemInstance::example_2x3(0.5);
        let rep = spel1_solve(&inst, &SolverConfig::default(), None).unwrap();
        for w in rep.trace.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            assert!(a.rho == 1.2 || a.rho == 2.0);
            assert_eq!(b.lambda, a.lambda * a.rho);
            assert_eq!(b.mu, a.mu * (1.0 / a.rho));
            assert_eq!(b.nu, a.nu * (1.0 / a.rho));
            assert!(b.eps <= a.eps);
            assert!(((b.nu / b.mu) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn l2_penalty_gradient_matches_differences() {
        let pen = L2SmoothPenalty {
            sigma: 1.0,
            lambda: 3.0,
            mu: 0.5,
        };
        let r = DVector::from_vec(vec![0.7, -0.4, 0.3]);
        let (_, g) = pen.value_and_residual_grad(&r);
        for i in 0..3 {
            let h = 1e-6;
            let mut rp = r.clone();
            rp[i] += h;
            let mut rm = r.clone();
            rm[i] -= h;
            let fd = (pen.value(&rp) - pen.value(&rm)) / (2.0 * h);
            assert!((fd - g[i]).abs() < 1e-6 * (1.0 + g[i].abs()));
        }
    }

    #[test]
    fn l2_baseline_on_example() {
        // ||b||_2 = 3 sqrt 2 > 1, and the minimizers lie on the l2 sphere of radius 1
        let inst = ProblemInstance::example_2x3(0.5);
        let rep = spel2_solve(&inst, &SolverConfig::default()).unwrap();
        assert!(rep.l2_residual <= 1.0 + 1e-6);
        assert!(rep.nnz() >= 1);
    }
}
