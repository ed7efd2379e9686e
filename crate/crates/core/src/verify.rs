//! Structural checks that every exact minimizer satisfies: the constraint is active,
//! the support columns are independent, and `||x||_inf` lies between bounds built from
//! the extreme Gram eigenvalues of the support columns.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Norm, ProblemInstance, SupportSet};
use crate::linalg::{default_rank_tol, gram_extremes, numerical_rank};
use crate::oracle::boundary_scaling_alpha;

pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KktPropertyReport {
    pub q: Norm,
    pub nnz: usize,
    pub rank_aj: usize,
    /// `max(inf_norm - upper_bound, lower_bound - inf_norm, 0)`.
    pub err1: f64,
    /// `sigma - ||Ax - b||_q`.
    pub err2: f64,
    pub inf_norm: f64,
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// `inf_norm - lower_bound`, unclipped.
    pub lower_slack: f64,
    /// `upper_bound - inf_norm`, unclipped.
    pub upper_slack: f64,
    pub residual_norm: f64,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub feasible: bool,
    /// Scale bringing `x` onto the boundary; `None` when `x` is infeasible.
    pub alpha: Option<f64>,
}

/// `(lower, upper)` bounds on `||x||_inf` for a support of size `j`.
pub fn inf_norm_bounds(
    inst: &ProblemInstance,
    q: Norm,
    j: usize,
    lambda_min: f64,
    lambda_max: f64,
) -> (f64, f64) {
    let m = inst.m() as f64;
    let inv_q = 1.0 / q.exponent();
    let e = 0.5 - inv_q;
    let lower = (q.of(inst.b.as_slice()) - inst.sigma) * m.powf(e.min(0.0))
        / (j as f64 * lambda_max).sqrt();
    let upper = if lambda_min > 0.0 {
        (inst.sigma * m.powf(e.max(0.0)) + inst.b.norm()) / lambda_min.sqrt()
    } else {
        f64::INFINITY
    };
    (lower, upper)
}

pub fn kkt_property_report(
    inst: &ProblemInstance,
    x: &DVector<f64>,
    q: Norm,
) -> Result<KktPropertyReport> {
    if x.len() != inst.n() {
        return Err(Error::DimensionMismatch(format!(
            "x has length {}, n = {}",
            x.len(),
            inst.n()
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("candidate point"));
    }
    let support = SupportSet::of(x.as_slice());
    if support.is_empty() {
        return Err(Error::EmptySupport);
    }
    let a_j = support.columns_of(&inst.a);
    let rank_aj = numerical_rank(&a_j, default_rank_tol(a_j.nrows(), a_j.ncols()));
    let g = gram_extremes(&a_j)?;
    // a rank-deficient support has a zero Gram eigenvalue
    let lambda_min = if rank_aj < support.len() {
        0.0
    } else {
        g.lambda_min
    };
    let (lower_bound, upper_bound) =
        inf_norm_bounds(inst, q, support.len(), lambda_min, g.lambda_max);
    let inf_norm = x.amax();
    let residual_norm = inst.residual_norm(x, q);
    let feasible = (residual_norm - inst.sigma).max(0.0) < DEFAULT_TOL;
    let alpha = if feasible {
        boundary_scaling_alpha(inst, x, q).ok()
    } else {
        None
    };
    Ok(KktPropertyReport {
        q,
        nnz: support.len(),
        rank_aj,
        err1: (inf_norm - upper_bound)
            .max(lower_bound - inf_norm)
            .max(0.0),
        err2: inst.sigma - residual_norm,
        inf_norm,
        lower_bound,
        upper_bound,
        lower_slack: inf_norm - lower_bound,
        upper_slack: upper_bound - inf_norm,
        residual_norm,
        lambda_min,
        lambda_max: g.lambda_max,
        feasible,
        alpha,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// The measured quantity the verdict is based on.
    pub measured: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub checks: Vec<Check>,
    pub report: KktPropertyReport,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Feasibility, then (i) boundary, (ii) `nnz = rank(A_J)`, (iii) the `||x||_inf` sandwich.
///
/// For `p = 0` the boundary check asks for a scale `alpha` in `(0, 1]` putting `x` on the
/// boundary instead.
pub fn theorem21_suite(
    inst: &ProblemInstance,
    x: &DVector<f64>,
    p: f64,
    q: Norm,
    tol: f64,
) -> Result<SuiteReport> {
    if !(0.0..1.0).contains(&p) {
        return Err(Error::param(format!("p = {p} outside [0, 1)")));
    }
    let report = kkt_property_report(inst, x, q)?;
    let violation = (report.residual_norm - inst.sigma).max(0.0);
    let mut checks = vec![Check {
        name: "feasible".into(),
        passed: violation <= tol,
        measured: violation,
    }];
    if p > 0.0 {
        checks.push(Check {
            name: "boundary".into(),
            passed: report.err2.abs() <= tol,
            measured: report.err2,
        });
    } else {
        let alpha = if violation <= tol {
            boundary_scaling_alpha(inst, x, q).ok()
        } else {
            None
        };
        checks.push(Check {
            name: "boundary_scaling".into(),
            passed: alpha.is_some_and(|a| a > 0.0 && a <= 1.0),
            measured: alpha.unwrap_or(f64::NAN),
        });
    }
    checks.push(Check {
        name: "nnz_eq_rank".into(),
        passed: report.nnz == report.rank_aj,
        measured: report.nnz as f64 - report.rank_aj as f64,
    });
    let slack = report.lower_slack.min(report.upper_slack);
    checks.push(Check {
        name: "inf_norm_sandwich".into(),
        passed: slack >= -tol,
        measured: slack,
    });
    Ok(SuiteReport { checks, report })
}
