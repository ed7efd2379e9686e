//! Smoothing of the L1 penalty term.
//!
//! `g_mu` smooths `(s)_+` and `h_nu` smooths `|t|`; both are exact outside a band of
//! half-width `mu/2` (resp. `nu/2`) and quadratic inside. The smoothed penalty is
//!
//! ```text
//! f(x) = lambda * g_mu( H_nu(Ax - b) - sigma ),   H_nu(z) = sum_i h_nu(z_i)
//! ```
//!
//! and `F = ||x||_p^p + f` is the objective minimized by the inner solver.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::ProblemInstance;

/// Penalty weight and the two smoothing widths.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoothingParams {
    pub lambda: f64,
    pub mu: f64,
    pub nu: f64,
}

impl SmoothingParams {
    pub fn new(lambda: f64, mu: f64, nu: f64) -> Result<Self> {
        let sp = Self { lambda, mu, nu };
        sp.check()?;
        Ok(sp)
    }

    pub fn check(&self) -> Result<()> {
        for (name, v) in [("lambda", self.lambda), ("mu", self.mu), ("nu", self.nu)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(format!("{name} = {v} must be positive")));
            }
        }
        Ok(())
    }
}

#[inline]
pub(crate) fn g_eval(s: f64, mu: f64) -> (f64, f64) {
    if s.abs() >= 0.5 * mu {
        if s > 0.0 {
            (s, 1.0)
        } else {
            (0.0, 0.0)
        }
    } else {
        (s * s / (2.0 * mu) + 0.5 * s + mu / 8.0, s / mu + 0.5)
    }
}

#[inline]
pub(crate) fn h_eval(t: f64, nu: f64) -> (f64, f64) {
    if t.abs() >= 0.5 * nu {
        (t.abs(), t.signum())
    } else {
        (t * t / nu + nu / 4.0, 2.0 * t / nu)
    }
}

/// Value and derivative of the smoothed plus-function `g_mu` at `s`.
pub fn g_plus(s: f64, mu: f64) -> Result<(f64, f64)> {
    if !(mu > 0.0) {
        return Err(Error::param(format!("mu = {mu} must be positive")));
    }
    Ok(g_eval(s, mu))
}

/// Value and derivative of the smoothed absolute value `h_nu` at `t`.
pub fn h_abs(t: f64, nu: f64) -> Result<(f64, f64)> {
    if !(nu > 0.0) {
        return Err(Error::param(format!("nu = {nu} must be positive")));
    }
    Ok(h_eval(t, nu))
}

/// `H_nu(z) = sum_i h_nu(z_i)`.
pub fn h_sum(z: &[f64], nu: f64) -> f64 {
    z.iter().map(|&t| h_eval(t, nu).0).sum()
}

/// `||x||_p^p` with `0^p = 0`, for `p` in `(0, 1]`.
pub fn phi_lp(x: &[f64], p: f64) -> Result<f64> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::param(format!("p = {p} outside (0, 1]")));
    }
    Ok(phi_unchecked(x, p))
}

#[inline]
pub(crate) fn phi_unchecked(x: &[f64], p: f64) -> f64 {
    x.iter()
        .filter(|v| **v != 0.0)
        .map(|v| v.abs().powf(p))
        .sum()
}

/// A smooth penalty that depends on `x` only through the residual `r = Ax - b`.
///
/// The gradient with respect to `x` is `A^T * residual_grad(r)`.
pub trait ResidualPenalty {
    fn value(&self, r: &DVector<f64>) -> f64;

    /// Penalty value and its gradient with respect to the residual.
    fn value_and_residual_grad(&self, r: &DVector<f64>) -> (f64, DVector<f64>);

    /// Upper clip for the initial step constant of the inner solver, given
    /// `m` and `||A||^2`.
    fn step_cap(&self, m: usize, a_norm_sq: f64) -> f64;
}

/// `lambda * g_mu(H_nu(r) - sigma)`.
#[derive(Clone, Copy, Debug)]
pub struct L1SmoothPenalty {
    pub sigma: f64,
    pub params: SmoothingParams,
}

impl ResidualPenalty for L1SmoothPenalty {
    fn value(&self, r: &DVector<f64>) -> f64 {
        let SmoothingParams { lambda, mu, nu } = self.params;
        lambda * g_eval(h_sum(r.as_slice(), nu) - self.sigma, mu).0
    }

    fn value_and_residual_grad(&self, r: &DVector<f64>) -> (f64, DVector<f64>) {
        let SmoothingParams { lambda, mu, nu } = self.params;
        let mut dh = DVector::zeros(r.len());
        let mut h_total = 0.0;
        for (d, &t) in dh.iter_mut().zip(r.iter()) {
            let (h, hp) = h_eval(t, nu);
            h_total += h;
            *d = hp;
        }
        let (g, gp) = g_eval(h_total - self.sigma, mu);
        let scale = lambda * gp;
        if scale == 0.0 {
            dh.fill(0.0);
        } else {
            dh *= scale;
        }
        (lambda * g, dh)
    }

    fn step_cap(&self, m: usize, a_norm_sq: f64) -> f64 {
        let SmoothingParams { lambda, mu, nu } = self.params;
        (m as f64 / mu + 2.0 / nu) * lambda * a_norm_sq
    }
}

/// Smoothed penalty value and gradient at `x`.
pub fn penalty_smooth(
    x: &DVector<f64>,
    inst: &ProblemInstance,
    sp: &SmoothingParams,
) -> Result<(f64, DVector<f64>)> {
    sp.check()?;
    if x.len() != inst.n() {
        return Err(Error::DimensionMismatch(format!(
            "x has length {}, n = {}",
            x.len(),
            inst.n()
        )));
    }
    let pen = L1SmoothPenalty {
        sigma: inst.sigma,
        params: *sp,
    };
    let (v, dr) = pen.value_and_residual_grad(&inst.residual(x));
    Ok((v, inst.a.tr_mul(&dr)))
}

/// `F(x) = ||x||_p^p + f(x)` using the instance exponent.
pub fn objective_value(
    x: &DVector<f64>,
    inst: &ProblemInstance,
    sp: &SmoothingParams,
) -> Result<f64> {
    let phi = phi_lp(x.as_slice(), inst.p)?;
    let (pen, _) = penalty_smooth(x, inst, sp)?;
    Ok(phi + pen)
}

/// One sample of a smoothing function, for plotting.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SmoothingSample {
    pub function: &'static str,
    pub width: f64,
    pub t: f64,
    pub value: f64,
    pub derivative: f64,
}

/// Samples `g_mu` for each `mu` and `h_nu` for each `nu` on `points` equispaced
/// abscissae in `[lo, hi]`.
pub fn sample_smoothing_grid(
    widths_g: &[f64],
    widths_h: &[f64],
    lo: f64,
    hi: f64,
    points: usize,
) -> Result<Vec<SmoothingSample>> {
    if points < 2 || !(hi > lo) {
        return Err(Error::param(
            "need at least 2 points on a nonempty interval",
        ));
    }
    let mut out = Vec::with_capacity((widths_g.len() + widths_h.len()) * points);
    let grid = |k: usize| lo + (hi - lo) * k as f64 / (points - 1) as f64;
    for &mu in widths_g {
        for k in 0..points {
            let t = grid(k);
            let (value, derivative) = g_plus(t, mu)?;
            out.push(SmoothingSample {
                function: "g",
                width: mu,
                t,
                value,
                derivative,
            });
        }
    }
    for &nu in widths_h {
        for k in 0..points {
            let t = grid(k);
            let (value, derivative) = h_abs(t, nu)?;
            out.push(SmoothingSample {
                function: "h",
                width: nu,
                t,
                value,
                derivative,
            });
        }
    }
    Ok(out)
}
