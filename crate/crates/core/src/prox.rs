//! Proximal map of `|t|^p` for `0 < p < 1`.
//!
//! For weight `w > 0` the scalar problem `min_t |t|^p + (w/2)(t - v)^2` has a dead
//! zone `|v| <= threshold(w, p)` where the minimizer is exactly zero. Outside it the
//! minimizer is the larger root of `p t^(p-1) + w (t - |v|) = 0` on `(0, |v|)`, found
//! by safeguarded Newton on the convex branch `[t_infl, |v|]`.

use nalgebra::DVector;

use crate::error::{Error, Result};

const NEWTON_CAP: usize = 100;

fn check(w: f64, p: f64) -> Result<()> {
    if !(w > 0.0 && w.is_finite()) {
        return Err(Error::param(format!(
            "prox weight w = {w} must be positive"
        )));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::param(format!(
            "prox exponent p = {p} outside (0, 1)"
        )));
    }
    Ok(())
}

/// Dead-zone radius: the prox output is zero iff `|v| <= threshold`.
pub fn prox_threshold(w: f64, p: f64) -> f64 {
    (2.0 - p) / (2.0 - 2.0 * p) * (2.0 * (1.0 - p) / w).powf(1.0 / (2.0 - p))
}

/// Scalar objective `|t|^p + (w/2)(t - v)^2`.
pub fn prox_objective(t: f64, v: f64, w: f64, p: f64) -> f64 {
    let d = t - v;
    let head = if t == 0.0 { 0.0 } else { t.abs().powf(p) };
    head + 0.5 * w * d * d
}

/// A global minimizer of `|t|^p + (w/2)(t - v)^2`.
pub fn prox_scalar(v: f64, w: f64, p: f64) -> Result<f64> {
    check(w, p)?;
    if !v.is_finite() {
        return Err(Error::NonFinite("prox input"));
    }
    Ok(prox_unchecked(v, w, p, prox_threshold(w, p)))
}

#[inline]
pub(crate) fn prox_unchecked(v: f64, w: f64, p: f64, threshold: f64) -> f64 {
    let av = v.abs();
    if av <= threshold {
        return 0.0;
    }
    let t = stationary_root(av, w, p);
    if prox_objective(t, av, w, p) < 0.5 * w * av * av {
        t.copysign(v)
    } else {
        0.0
    }
}

/// Larger root of `p t^(p-1) + w (t - v) = 0` for `v` above the dead zone.
fn stationary_root(v: f64, w: f64, p: f64) -> f64 {
    let stat = |t: f64| p * t.powf(p - 1.0) + w * (t - v);
    let slope = |t: f64| p * (p - 1.0) * t.powf(p - 2.0) + w;
    let tol = 1e-13 * w.max(1.0) * v.max(1.0);
    // the stationarity function is convex and increasing on [t_infl, inf), and
    // positive at v, so Newton from v descends monotonically onto the root
    let mut lo = (p * (1.0 - p) / w).powf(1.0 / (2.0 - p));
    let mut hi = v;
    let mut t = v;
    for _ in 0..NEWTON_CAP {
        let f = stat(t);
        if f.abs() <= tol {
            break;
        }
        if f > 0.0 {
            hi = t;
        } else {
            lo = t;
        }
        let d = slope(t);
        let mut next = t - f / d;
        if !(next > lo && next < hi) || !next.is_finite() {
            next = 0.5 * (lo + hi);
        }
        if next == t {
            break;
        }
        t = next;
    }
    t
}

/// Coordinatewise prox at `x - grad / l` with weight `l`.
pub fn prox_vector(x: &DVector<f64>, grad: &DVector<f64>, l: f64, p: f64) -> Result<DVector<f64>> {
    check(l, p)?;
    if x.len() != grad.len() {
        return Err(Error::DimensionMismatch(format!(
            "x has length {}, gradient {}",
            x.len(),
            grad.len()
        )));
    }
    Ok(prox_step(x, grad, l, p))
}

pub(crate) fn prox_step(x: &DVector<f64>, grad: &DVector<f64>, l: f64, p: f64) -> DVector<f64> {
    let threshold = prox_threshold(l, p);
    x.zip_map(grad, |xi, gi| prox_unchecked(xi - gi / l, l, p, threshold))
}
