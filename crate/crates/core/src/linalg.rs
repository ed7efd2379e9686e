//! Dense kernels: lq norms, minimum-norm least squares, numerical rank,
//! extreme Gram eigenvalues and the squared spectral norm.

use nalgebra::{DMatrix, DVector, SVD};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative singular-value cutoff for rank decisions on an `m x n` matrix.
pub fn default_rank_tol(m: usize, n: usize) -> f64 {
    1e-10 * m.max(n) as f64
}

/// `||x||_q` for `q` in `[1, inf]`.
pub fn lq_norm(x: &[f64], q: f64) -> Result<f64> {
    if q.is_nan() || q < 1.0 {
        return Err(Error::InvalidNorm(q));
    }
    if q.is_infinite() {
        return Ok(x.iter().fold(0.0, |acc, v| acc.max(v.abs())));
    }
    if q == 1.0 {
        return Ok(x.iter().map(|v| v.abs()).sum());
    }
    if q == 2.0 {
        return Ok(x.iter().map(|v| v * v).sum::<f64>().sqrt());
    }
    // scale by the max entry so large q does not overflow
    let scale = x.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    if scale == 0.0 {
        return Ok(0.0);
    }
    let sum: f64 = x.iter().map(|v| (v.abs() / scale).powf(q)).sum();
    Ok(scale * sum.powf(1.0 / q))
}

fn singular_values(a: &DMatrix<f64>) -> DVector<f64> {
    if a.is_empty() {
        return DVector::zeros(0);
    }
    SVD::new(a.clone(), false, false).singular_values
}

/// Minimum 2-norm minimizer of `||Ax - b||_2`, i.e. the pseudoinverse action `A^+ b`.
pub fn least_squares_min_norm(a: &DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    if a.nrows() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "A has {} rows, b has length {}",
            a.nrows(),
            b.len()
        )));
    }
    if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("least-squares data"));
    }
    let svd = SVD::new(a.clone(), true, true);
    let smax = svd.singular_values.max();
    if smax == 0.0 {
        return Ok(DVector::zeros(a.ncols()));
    }
    let cutoff = default_rank_tol(a.nrows(), a.ncols()) * smax;
    let x = svd
        .solve(b, cutoff)
        .map_err(|e| Error::param(format!("pseudoinverse solve failed: {e}")))?;
    Ok(x)
}

/// Count of singular values above `rel_tol * sigma_max`.
pub fn numerical_rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    let sv = singular_values(m);
    if sv.is_empty() {
        return 0;
    }
    let smax = sv.max();
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

/// Extreme eigenvalues of `A_J^T A_J`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramExtremes {
    pub lambda_min: f64,
    pub lambda_max: f64,
}

/// Extreme eigenvalues of the Gram matrix of `a_j`, from its squared singular values.
pub fn gram_extremes(a_j: &DMatrix<f64>) -> Result<GramExtremes> {
    if a_j.ncols() == 0 {
        return Err(Error::param("gram_extremes needs at least one column"));
    }
    let sv = singular_values(a_j);
    let lambda_max = sv.max().powi(2);
    // more columns than rows: the Gram matrix is singular
    let lambda_min = if a_j.ncols() > a_j.nrows() {
        0.0
    } else {
        sv.min().powi(2)
    };
    Ok(GramExtremes {
        lambda_min,
        lambda_max,
    })
}

/// Smallest eigenvalue of `A^T A` that is nonzero under the rank cutoff `rel_tol`.
pub fn smallest_nonzero_gram_eigenvalue(a: &DMatrix<f64>, rel_tol: f64) -> Option<f64> {
    let sv = singular_values(a);
    if sv.is_empty() {
        return None;
    }
    let smax = sv.max();
    sv.iter()
        .copied()
        .filter(|&s| s > rel_tol * smax && s > 0.0)
        .fold(None, |acc: Option<f64>, s| {
            Some(acc.map_or(s, |a| a.min(s)))
        })
        .map(|s| s * s)
}

const POWER_ITER_CAP: usize = 500;

/// `||A||_2^2` by power iteration on `A^T A` from the normalized all-ones vector.
pub fn spectral_norm_sq(a: &DMatrix<f64>) -> f64 {
    let n = a.ncols();
    if n == 0 || a.nrows() == 0 {
        return 0.0;
    }
    let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let mut estimate = 0.0;
    for _ in 0..POWER_ITER_CAP {
        let av = a * &v;
        let w = a.tr_mul(&av);
        let norm = w.norm();
        if norm == 0.0 {
            // start vector in the null space; fall back to an exact answer
            return singular_values(a).max().powi(2);
        }
        let next = av.norm_squared();
        v = w / norm;
        if (next - estimate).abs() <= 1e-15 * next {
            estimate = next;
            break;
        }
        estimate = next;
    }
    let av = a * &v;
    estimate.max(av.norm_squared())
}
