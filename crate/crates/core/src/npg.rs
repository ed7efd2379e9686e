//! Nonmonotone proximal gradient (NPG) for `min_x ||x||_p^p + f(x)` with `f` smooth.
//!
//! Each step solves the separable model
//!
//! ```text
//! w = argmin_x ||x||_p^p + <grad f(x_l), x> + (L/2) ||x - x_l||^2,   L = tau^i L0
//! ```
//!
//! for the smallest `i` such that `F(w) <= max_{l-N <= j <= l} F(x_j) - (c/2) ||w - x_l||^2`.
//! The initial constant `L0` is a Barzilai-Borwein style curvature estimate averaged over
//! the three most recent iterates, clipped to `[L_min, L_max]`.

use std::collections::VecDeque;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::config::{NpgParams, SolverConfig};
use crate::error::{Error, Result};
use crate::instance::ProblemInstance;
use crate::linalg::spectral_norm_sq;
use crate::prox::prox_step;
use crate::smoothing::{phi_unchecked, L1SmoothPenalty, ResidualPenalty, SmoothingParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    /// `L ||x_{l+1} - x_l|| / (1 + ||x_{l+1}||) < eps`
    StepTol,
    /// Relative change of the objective below `eps^1.2`.
    ObjTol,
    IterCap,
}

/// One accepted inner step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NpgRecord {
    pub iter: usize,
    /// Objective at the accepted point.
    pub f: f64,
    /// Max over the nonmonotone window the step was compared against.
    pub f_ref: f64,
    pub l_bar: f64,
    pub step_norm: f64,
    pub backtracks: u32,
}

#[derive(Clone, Debug)]
pub struct NpgOutcome {
    /// Returned iterate `x^{l}`.
    pub x_final: DVector<f64>,
    /// The prox-gradient point `x^{l+1}` computed from `x_final`.
    pub x_post: DVector<f64>,
    /// Accepted steps taken.
    pub iters: usize,
    pub stop_reason: StopReason,
    /// `L_bar ||x_post - x_final||`, a bound on the distance of zero to the
    /// subdifferential at `x_post`.
    pub stationarity_bound: f64,
    pub l_bar: f64,
    pub f_initial: f64,
    pub f_final: f64,
    pub trace: Vec<NpgRecord>,
}

/// Iterate history used for the step-size initialization.
#[derive(Clone, Debug)]
pub struct NpgState {
    pub x_curr: DVector<f64>,
    pub x_prev: DVector<f64>,
    pub x_prev2: DVector<f64>,
    grad_curr: DVector<f64>,
    grad_prev: DVector<f64>,
    grad_prev2: DVector<f64>,
    /// Objective values of the last `memory + 1` iterates.
    pub f_history: VecDeque<f64>,
    pub l_bar_prev: Option<f64>,
    pub iter: usize,
    memory: usize,
}

fn curvature(
    y: &DVector<f64>,
    y_old: &DVector<f64>,
    g: &DVector<f64>,
    g_old: &DVector<f64>,
) -> f64 {
    let dy = y - y_old;
    let nrm = dy.norm_squared();
    if nrm == 0.0 {
        return 0.0;
    }
    dy.dot(&(g - g_old)) / nrm
}

impl NpgState {
    /// Fresh state at `x0`; the two previous slots duplicate `x0`.
    pub fn new(x0: DVector<f64>, grad0: DVector<f64>, f0: f64, memory: usize) -> Self {
        let mut f_history = VecDeque::with_capacity(memory + 1);
        f_history.push_back(f0);
        Self {
            x_prev: x0.clone(),
            x_prev2: x0.clone(),
            x_curr: x0,
            grad_prev: grad0.clone(),
            grad_prev2: grad0.clone(),
            grad_curr: grad0,
            f_history,
            l_bar_prev: None,
            iter: 0,
            memory,
        }
    }

    /// Averaged curvature of the smooth part over the three stored iterates.
    pub fn curvature_estimate(&self) -> f64 {
        (curvature(&self.x_curr, &self.x_prev, &self.grad_curr, &self.grad_prev)
            + curvature(
                &self.x_curr,
                &self.x_prev2,
                &self.grad_curr,
                &self.grad_prev2,
            )
            + curvature(
                &self.x_prev,
                &self.x_prev2,
                &self.grad_prev,
                &self.grad_prev2,
            ))
            / 3.0
    }

    /// Initial step constant `L0` for the next step.
    pub fn init_step_constant(&self, l_min: f64, l_max: f64) -> f64 {
        let raw = match self.l_bar_prev {
            None => 1.0,
            Some(l_bar) => self.curvature_estimate().max(0.5 * l_bar),
        };
        raw.max(l_min).min(l_max)
    }

    fn f_ref(&self) -> f64 {
        self.f_history
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn f_curr(&self) -> f64 {
        *self.f_history.back().expect("history is never empty")
    }

    fn advance(&mut self, x: DVector<f64>, grad: DVector<f64>, f: f64, l_bar: f64) {
        self.x_prev2 = std::mem::replace(&mut self.x_prev, std::mem::replace(&mut self.x_curr, x));
        self.grad_prev2 = std::mem::replace(
            &mut self.grad_prev,
            std::mem::replace(&mut self.grad_curr, grad),
        );
        self.f_history.push_back(f);
        while self.f_history.len() > self.memory + 1 {
            self.f_history.pop_front();
        }
        self.l_bar_prev = Some(l_bar);
        self.iter += 1;
    }
}

/// `||x||_p^p + P(Ax - b)` for a smooth residual penalty `P`.
pub struct CompositeProblem<'a, P> {
    pub a: &'a DMatrix<f64>,
    pub b: &'a DVector<f64>,
    pub penalty: &'a P,
    pub p: f64,
}

impl<P: ResidualPenalty> CompositeProblem<'_, P> {
    pub fn objective(&self, x: &DVector<f64>) -> f64 {
        phi_unchecked(x.as_slice(), self.p) + self.penalty.value(&(self.a * x - self.b))
    }

    fn value_grad(&self, x: &DVector<f64>) -> (f64, DVector<f64>) {
        let r = self.a * x - self.b;
        let (v, dr) = self.penalty.value_and_residual_grad(&r);
        (phi_unchecked(x.as_slice(), self.p) + v, self.a.tr_mul(&dr))
    }

    /// Runs NPG from `x0` until one of the stopping rules fires.
    pub fn minimize(
        &self,
        x0: DVector<f64>,
        eps: f64,
        params: &NpgParams,
        a_norm_sq: f64,
        record_trace: bool,
    ) -> Result<NpgOutcome> {
        if !(eps > 0.0) {
            return Err(Error::param(format!(
                "subproblem tolerance {eps} must be positive"
            )));
        }
        if x0.len() != self.a.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "x0 has length {}, n = {}",
                x0.len(),
                self.a.ncols()
            )));
        }
        if x0.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("x0"));
        }
        let l_min = params.l_min;
        let l_max = if params.l_max_formula_enabled {
            self.penalty.step_cap(self.a.nrows(), a_norm_sq).max(l_min)
        } else {
            f64::INFINITY
        };
        let (f0, g0) = self.value_grad(&x0);
        if !f0.is_finite() {
            return Err(Error::NonFinite("initial objective"));
        }
        let level_bound = f0.powf(1.0 / self.p);
        let mut state = NpgState::new(x0, g0, f0, params.memory);
        let mut trace = Vec::new();

        loop {
            let l0 = state.init_step_constant(l_min, l_max);
            let f_ref = state.f_ref();
            let mut accepted = None;
            for i in 0..=params.backtrack_cap {
                let l = l0 * params.tau.powi(i as i32);
                let w = prox_step(&state.x_curr, &state.grad_curr, l, self.p);
                let r = self.a * &w - self.b;
                let f_w = phi_unchecked(w.as_slice(), self.p) + self.penalty.value(&r);
                let step_sq = (&w - &state.x_curr).norm_squared();
                if f_w - f_ref <= -0.5 * params.c * step_sq {
                    accepted = Some((w, r, f_w, step_sq.sqrt(), l, i));
                    break;
                }
            }
            let Some((w, r, f_w, step, l_bar, backtracks)) = accepted else {
                return Err(Error::LineSearchStalled {
                    iter: state.iter,
                    doublings: params.backtrack_cap,
                    l: l0 * params.tau.powi(params.backtrack_cap as i32),
                });
            };
            debug_assert!(
                w.amax() <= level_bound * (1.0 + 1e-10) + 1e-300,
                "iterate left the initial level set"
            );
            if record_trace {
                trace.push(NpgRecord {
                    iter: state.iter + 1,
                    f: f_w,
                    f_ref,
                    l_bar,
                    step_norm: step,
                    backtracks,
                });
            }

            let f_curr = state.f_curr();
            let accepted_steps = state.iter + 1;
            let stop = if l_bar * step / (1.0 + w.norm()) < eps {
                Some(StopReason::StepTol)
            } else if (f_w - f_curr).abs() / (1.0 + f_w.abs()) < eps.powf(1.2) {
                Some(StopReason::ObjTol)
            } else if accepted_steps >= params.iter_cap {
                Some(StopReason::IterCap)
            } else {
                None
            };

            if let Some(stop_reason) = stop {
                debug_assert!(
                    f_curr <= f0 + 1e-12 * (1.0 + f0.abs()),
                    "returned iterate increased the objective"
                );
                return Ok(NpgOutcome {
                    x_final: state.x_curr,
                    x_post: w,
                    iters: accepted_steps,
                    stop_reason,
                    stationarity_bound: l_bar * step,
                    l_bar,
                    f_initial: f0,
                    f_final: f_curr,
                    trace,
                });
            }

            let (pen, dr) = self.penalty.value_and_residual_grad(&r);
            let f_w = phi_unchecked(w.as_slice(), self.p) + pen;
            let grad = self.a.tr_mul(&dr);
            state.advance(w, grad, f_w, l_bar);
        }
    }
}

/// Approximately minimizes the smoothed penalty objective for fixed `(lambda, mu, nu)`.
pub fn npg_solve(
    inst: &ProblemInstance,
    sp: &SmoothingParams,
    x0: &DVector<f64>,
    eps: f64,
    cfg: &SolverConfig,
) -> Result<NpgOutcome> {
    sp.check()?;
    if !(inst.p > 0.0 && inst.p < 1.0) {
        return Err(Error::param(format!("p = {} outside (0, 1)", inst.p)));
    }
    let penalty = L1SmoothPenalty {
        sigma: inst.sigma,
        params: *sp,
    };
    let problem = CompositeProblem {
        a: &inst.a,
        b: &inst.b,
        penalty: &penalty,
        p: inst.p,
    };
    problem.minimize(x0.clone(), eps, &cfg.npg, spectral_norm_sq(&inst.a), false)
}

/// Writes an inner trace as CSV.
pub fn write_npg_trace<W: std::io::Write>(records: &[NpgRecord], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
