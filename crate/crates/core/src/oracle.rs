//! Exact ground truth for tiny instances.
//!
//! The feasible set `{x : ||Ax - b||_1 <= sigma}` is the polyhedron `U A x <= U b + sigma 1`
//! where `U` stacks all `2^m` sign vectors. Minimizers of `||x||_p^p` over it are extreme
//! points of its intersections with the orthants, so enumerating those gives the exact
//! solution set for every `0 < p < 1`.
//!
//! Enumeration works face by face rather than over `n`-subsets of the `2^m + n`
//! halfspaces: a point with support `F` is an orthant extreme point iff `z = A_F y - b`
//! is the unique point of `range(A_F) - b` on the affine hull of some face of the l1
//! sphere of radius `sigma`. A face is fixed by its support `S` and signs `s`:
//! `z_i = 0` off `S` and `sum_{i in S} s_i z_i = sigma` with `s_i z_i >= 0`.

use nalgebra::{DMatrix, DVector, SVD};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{Norm, ProblemInstance, SupportSet};
use crate::linalg::{default_rank_tol, smallest_nonzero_gram_eigenvalue};
use crate::simplex::l1_regression;
use crate::smoothing::phi_unchecked;

pub const MAX_SIGN_ROWS_LOG2: usize = 16;
pub const MAX_ENUM_DIM: usize = 8;
pub const MAX_L0_COLS: usize = 10;
pub const MAX_SANDWICH_ROWS: usize = 12;

/// Relative tolerance for merging vertices.
pub const DEDUP_TOL: f64 = 1e-9;
/// Relative tolerance for ties in the objective.
pub const TIE_TOL: f64 = 1e-9;

/// All `2^m` sign vectors of length `m`, one per row.
///
/// Row `k` has `-1` in coordinate `j` iff bit `m - 1 - j` of `k` is set, so the rows
/// run lexicographically with `+1` before `-1` and row `2^m - 1 - k` is the negation
/// of row `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct SignMatrix {
    pub u: DMatrix<f64>,
}

impl SignMatrix {
    pub fn m(&self) -> usize {
        self.u.ncols()
    }
}

fn sign_vector(k: usize, len: usize) -> Vec<f64> {
    (0..len)
        .map(|j| {
            if k >> (len - 1 - j) & 1 == 1 {
                -1.0
            } else {
                1.0
            }
        })
        .collect()
}

pub fn build_sign_matrix(m: usize) -> Result<SignMatrix> {
    if m == 0 {
        return Err(Error::param("sign matrix needs m >= 1"));
    }
    if m > MAX_SIGN_ROWS_LOG2 {
        return Err(Error::TooLarge {
            what: format!("sign matrix for m = {m}"),
            limit: MAX_SIGN_ROWS_LOG2,
        });
    }
    let rows = 1usize << m;
    let mut u = DMatrix::zeros(rows, m);
    for k in 0..rows {
        for (j, s) in sign_vector(k, m).into_iter().enumerate() {
            u[(k, j)] = s;
        }
    }
    Ok(SignMatrix { u })
}

/// `(U A, U b + sigma 1)`: `||Ax - b||_1 <= sigma` iff `(U A) x <= U b + sigma 1`.
pub fn l1_ball_halfspaces(inst: &ProblemInstance) -> Result<(DMatrix<f64>, DVector<f64>)> {
    let u = build_sign_matrix(inst.m())?.u;
    let a_t = &u * &inst.a;
    let b_t = (&u * &inst.b).add_scalar(inst.sigma);
    Ok((a_t, b_t))
}

/// Extreme points of one orthant intersected with the feasible set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexSet {
    /// `+1` for `x_i >= 0`, `-1` for `x_i <= 0`.
    pub orthant_sign: Vec<i8>,
    pub vertices: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactSolutionSet {
    /// 0 for the sparsity count.
    pub p: f64,
    pub optimal_value: f64,
    pub minimizers: Vec<Vec<f64>>,
    /// Supports of the minimizers (for `p = 0`: every optimal support).
    pub supports: Vec<SupportSet>,
}

impl ExactSolutionSet {
    /// Whether `x` is feasible with exactly `optimal_value` nonzeros (for a `p = 0` set).
    pub fn l0_contains(&self, inst: &ProblemInstance, x: &[f64], tol: f64) -> bool {
        let v = DVector::from_column_slice(x);
        let feasible = inst.residual_norm(&v, Norm::L1) <= inst.sigma + tol * (1.0 + inst.sigma);
        let top = v.amax();
        let nnz = x.iter().filter(|t| t.abs() > tol * (1.0 + top)).count();
        feasible && nnz as f64 == self.optimal_value
    }
}

fn check_enum_size(inst: &ProblemInstance, max_n: usize) -> Result<()> {
    if inst.n() > max_n {
        return Err(Error::TooLarge {
            what: format!("oracle with n = {}", inst.n()),
            limit: max_n,
        });
    }
    if inst.m() > MAX_ENUM_DIM {
        return Err(Error::TooLarge {
            what: format!("oracle with m = {}", inst.m()),
            limit: MAX_ENUM_DIM,
        });
    }
    Ok(())
}

fn same_point(a: &[f64], b: &[f64]) -> bool {
    let scale = 1.0 + a.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    a.iter()
        .zip(b)
        .all(|(x, y)| (x - y).abs() <= DEDUP_TOL * scale)
}

fn push_unique(out: &mut Vec<Vec<f64>>, v: Vec<f64>) {
    if !out.iter().any(|w| same_point(w, &v)) {
        out.push(v);
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

/// Unique solution of `M y = rhs` if `M` has full column rank and the system is consistent.
fn unique_solution(mat: &DMatrix<f64>, rhs: &DVector<f64>) -> Option<DVector<f64>> {
    let k = mat.ncols();
    if mat.nrows() < k {
        return None;
    }
    let svd = SVD::new(mat.clone(), true, true);
    let smax = svd.singular_values.max();
    if smax == 0.0 {
        return None;
    }
    let cutoff = default_rank_tol(mat.nrows(), k) * smax;
    if svd.singular_values.iter().filter(|&&s| s > cutoff).count() < k {
        return None;
    }
    let y = svd.solve(rhs, cutoff).ok()?;
    let resid = (mat * &y - rhs).amax();
    if resid > 1e-9 * (1.0 + rhs.amax()) {
        return None;
    }
    Some(y)
}

/// Extreme points with support inside the column set `cols`.
fn vertices_for_columns(inst: &ProblemInstance, cols: &[usize]) -> Vec<Vec<f64>> {
    let (m, n) = (inst.m(), inst.n());
    let k = cols.len();
    let a_f = inst.a.select_columns(cols);
    let tol = 1e-9 * (1.0 + inst.sigma + inst.b.amax());
    let mut out = Vec::new();
    // unique solvability needs (m - |S|) + 1 >= k equations
    for s_mask in 1usize..(1 << m) {
        let s_size = s_mask.count_ones() as usize;
        if m + 1 < k + s_size {
            continue;
        }
        let in_s: Vec<usize> = (0..m).filter(|i| s_mask >> i & 1 == 1).collect();
        let off_s: Vec<usize> = (0..m).filter(|i| s_mask >> i & 1 == 0).collect();
        for sign_bits in 0usize..(1 << s_size) {
            let signs: Vec<f64> = (0..s_size)
                .map(|t| if sign_bits >> t & 1 == 1 { -1.0 } else { 1.0 })
                .collect();
            let rows = off_s.len() + 1;
            let mut mat = DMatrix::zeros(rows, k);
            let mut rhs = DVector::zeros(rows);
            for (r, &i) in off_s.iter().enumerate() {
                mat.row_mut(r).copy_from(&a_f.row(i));
                rhs[r] = inst.b[i];
            }
            let last = rows - 1;
            rhs[last] = inst.sigma;
            for (&i, &s) in in_s.iter().zip(&signs) {
                for c in 0..k {
                    mat[(last, c)] += s * a_f[(i, c)];
                }
                rhs[last] += s * inst.b[i];
            }
            let Some(y) = unique_solution(&mat, &rhs) else {
                continue;
            };
            let z = &a_f * &y - &inst.b;
            if in_s.iter().zip(&signs).any(|(&i, &s)| s * z[i] < -tol) {
                continue;
            }
            let top = y.amax();
            let mut v = vec![0.0; n];
            for (c, &j) in cols.iter().enumerate() {
                v[j] = if y[c].abs() <= 1e-12 * (1.0 + top) {
                    0.0
                } else {
                    y[c]
                };
            }
            push_unique(&mut out, v);
        }
    }
    out
}

/// The union over all orthants of their extreme points, sorted lexicographically.
pub fn all_extreme_points(inst: &ProblemInstance) -> Result<Vec<Vec<f64>>> {
    check_enum_size(inst, MAX_ENUM_DIM)?;
    let n = inst.n();
    let mut points = Vec::new();
    if inst.b.lp_norm(1) <= inst.sigma {
        points.push(vec![0.0; n]);
    }
    let col_sets: Vec<Vec<usize>> = (1usize..(1 << n))
        .filter(|mask| mask.count_ones() as usize <= inst.m())
        .map(|mask| (0..n).filter(|j| mask >> j & 1 == 1).collect())
        .collect();
    let found: Vec<Vec<Vec<f64>>> = col_sets
        .par_iter()
        .map(|cols| vertices_for_columns(inst, cols))
        .collect();
    for v in found.into_iter().flatten() {
        push_unique(&mut points, v);
    }
    points.sort_by(|a, b| lex_cmp(a, b));
    Ok(points)
}

fn in_orthant(v: &[f64], signs: &[i8]) -> bool {
    v.iter()
        .zip(signs)
        .all(|(x, &s)| *x == 0.0 || (*x > 0.0) == (s > 0))
}

/// Extreme points of `{x : ||Ax - b||_1 <= sigma, signs_i x_i >= 0}`.
pub fn enumerate_orthant_vertices(inst: &ProblemInstance, signs: &[i8]) -> Result<VertexSet> {
    if signs.len() != inst.n() || signs.iter().any(|s| s.abs() != 1) {
        return Err(Error::param(format!(
            "orthant needs {} signs in {{-1, +1}}",
            inst.n()
        )));
    }
    let all = all_extreme_points(inst)?;
    Ok(VertexSet {
        orthant_sign: signs.to_vec(),
        vertices: all.into_iter().filter(|v| in_orthant(v, signs)).collect(),
    })
}

/// Vertex sets of all `2^n` orthants, in the sign-matrix row order.
pub fn enumerate_all_orthants(inst: &ProblemInstance) -> Result<Vec<VertexSet>> {
    let all = all_extreme_points(inst)?;
    let n = inst.n();
    Ok((0..1usize << n)
        .map(|k| {
            let signs: Vec<i8> = sign_vector(k, n).into_iter().map(|s| s as i8).collect();
            let vertices = all
                .iter()
                .filter(|v| in_orthant(v, &signs))
                .cloned()
                .collect();
            VertexSet {
                orthant_sign: signs,
                vertices,
            }
        })
        .collect())
}

fn minimize_over(points: &[Vec<f64>], p: f64) -> ExactSolutionSet {
    let values: Vec<f64> = points.iter().map(|v| phi_unchecked(v, p)).collect();
    let best = values.iter().copied().fold(f64::INFINITY, f64::min);
    let minimizers: Vec<Vec<f64>> = points
        .iter()
        .zip(&values)
        .filter(|(_, &v)| v <= best + TIE_TOL * best.abs().max(1e-300))
        .map(|(x, _)| x.clone())
        .collect();
    ExactSolutionSet {
        p,
        optimal_value: best,
        supports: minimizers.iter().map(|x| SupportSet::of(x)).collect(),
        minimizers,
    }
}

/// All global minimizers of `||x||_p^p` over the feasible set.
pub fn solve_exact_lp_quasinorm(inst: &ProblemInstance, p: f64) -> Result<ExactSolutionSet> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::param(format!("p = {p} outside (0, 1)")));
    }
    let points = all_extreme_points(inst)?;
    let sol = minimize_over(&points, p);
    debug_assert!(sol.minimizers.len() <= points.len());
    Ok(sol)
}

fn subsets_of_size(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0usize..1 << n)
        .filter(|mask| mask.count_ones() as usize == k)
        .map(|mask| (0..n).filter(|j| mask >> j & 1 == 1).collect())
        .collect()
}

/// Smallest number of nonzeros of a feasible point, with one witness per optimal support.
pub fn solve_exact_l0(inst: &ProblemInstance) -> Result<ExactSolutionSet> {
    check_enum_size(inst, MAX_L0_COLS)?;
    let n = inst.n();
    let tol = 1e-9 * (1.0 + inst.sigma);
    if inst.b.lp_norm(1) <= inst.sigma + tol {
        return Ok(ExactSolutionSet {
            p: 0.0,
            optimal_value: 0.0,
            minimizers: vec![vec![0.0; n]],
            supports: vec![SupportSet::of(&vec![0.0; n])],
        });
    }
    let b = inst.b.as_slice().to_vec();
    for k in 1..=n {
        let hits: Vec<(Vec<usize>, Vec<f64>)> = subsets_of_size(n, k)
            .into_par_iter()
            .map(|cols| -> Result<Option<(Vec<usize>, Vec<f64>)>> {
                let (y, value) = l1_regression(&inst.a.select_columns(&cols), &b)?;
                Ok((value <= inst.sigma + tol).then_some((cols, y)))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        if hits.is_empty() {
            continue;
        }
        let mut minimizers = Vec::new();
        let mut supports = Vec::new();
        for (cols, y) in hits {
            let mut x = vec![0.0; n];
            for (c, &j) in cols.iter().enumerate() {
                x[j] = y[c];
            }
            supports.push(SupportSet::from_indices(cols, n)?);
            minimizers.push(x);
        }
        return Ok(ExactSolutionSet {
            p: 0.0,
            optimal_value: k as f64,
            minimizers,
            supports,
        });
    }
    // unreachable under ||b||_1 > sigma only if A has no feasible point at all
    Err(Error::NotFeasible {
        residual: f64::NAN,
        sigma: inst.sigma,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PStarEstimate {
    pub p_star: f64,
    /// `(sigma + ||b||_2) / sqrt(lambda_star)`.
    pub r: f64,
    /// Smallest nonzero magnitude over all orthant extreme points.
    pub r_tilde: f64,
    /// Optimal number of nonzeros.
    pub s: usize,
    /// Smallest nonzero eigenvalue of `A^T A`.
    pub lambda_star: f64,
}

/// Membership of every `l_p` minimizer in the sparsest feasible set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InclusionCheck {
    pub p: f64,
    pub sparsest_nnz: usize,
    pub minimizers: Vec<Vec<f64>>,
    /// Minimizers that are not sparsest feasible points.
    pub violations: Vec<Vec<f64>>,
}

impl InclusionCheck {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_inclusion(
    inst: &ProblemInstance,
    l0: &ExactSolutionSet,
    p: f64,
) -> Result<InclusionCheck> {
    let sol = solve_exact_lp_quasinorm(inst, p)?;
    let violations = sol
        .minimizers
        .iter()
        .filter(|x| !l0.l0_contains(inst, x, DEDUP_TOL))
        .cloned()
        .collect();
    Ok(InclusionCheck {
        p,
        sparsest_nnz: l0.optimal_value as usize,
        minimizers: sol.minimizers,
        violations,
    })
}

/// Exponent below which every `l_p` minimizer is also a sparsest feasible point.
pub fn estimate_p_star(inst: &ProblemInstance) -> Result<PStarEstimate> {
    check_enum_size(inst, MAX_ENUM_DIM)?;
    let lambda_star =
        smallest_nonzero_gram_eigenvalue(&inst.a, default_rank_tol(inst.m(), inst.n()))
            .ok_or_else(|| Error::param("A has no nonzero singular value"))?;
    let r = (inst.sigma + inst.b.norm()) / lambda_star.sqrt();
    let r_tilde = all_extreme_points(inst)?
        .iter()
        .flatten()
        .filter(|v| **v != 0.0)
        .fold(f64::INFINITY, |acc, v| acc.min(v.abs()));
    let s = solve_exact_l0(inst)?.optimal_value as usize;
    let p_star = if s == 0 || !r_tilde.is_finite() || r <= r_tilde {
        1.0
    } else {
        let s = s as f64;
        (((s + 1.0) / s).ln() / (r / r_tilde).ln()).min(1.0)
    };
    Ok(PStarEstimate {
        p_star,
        r,
        r_tilde,
        s,
        lambda_star,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SandwichCheck {
    /// `2^(1-m) ||(A~x - b~)_+||_1`.
    pub lhs: f64,
    /// `(||Ax - b||_1 - sigma)_+`.
    pub mid: f64,
    /// `||(A~x - b~)_+||_1`.
    pub rhs: f64,
    pub holds: bool,
}

pub fn residual_sandwich_check(inst: &ProblemInstance, x: &DVector<f64>) -> Result<SandwichCheck> {
    if inst.m() > MAX_SANDWICH_ROWS {
        return Err(Error::TooLarge {
            what: format!("residual sandwich with m = {}", inst.m()),
            limit: MAX_SANDWICH_ROWS,
        });
    }
    if x.len() != inst.n() {
        return Err(Error::DimensionMismatch(format!(
            "x has length {}, n = {}",
            x.len(),
            inst.n()
        )));
    }
    let (a_t, b_t) = l1_ball_halfspaces(inst)?;
    let rhs: f64 = (&a_t * x - &b_t).iter().map(|v| v.max(0.0)).sum();
    let mid = (inst.residual_norm(x, Norm::L1) - inst.sigma).max(0.0);
    let lhs = rhs * 0.5f64.powi(inst.m() as i32 - 1);
    let slack = 1e-10 * (1.0 + rhs);
    Ok(SandwichCheck {
        lhs,
        mid,
        rhs,
        holds: lhs <= mid + slack && mid <= rhs + slack,
    })
}

const ALPHA_TOL: f64 = 1e-10;

/// `alpha` in `(0, 1]` with `||A (alpha x) - b||_q = sigma`, by bisection.
pub fn boundary_scaling_alpha(inst: &ProblemInstance, x: &DVector<f64>, q: Norm) -> Result<f64> {
    if x.len() != inst.n() {
        return Err(Error::DimensionMismatch(format!(
            "x has length {}, n = {}",
            x.len(),
            inst.n()
        )));
    }
    let f = |t: f64| inst.residual_norm(&(x * t), q) - inst.sigma;
    let f0 = f(0.0);
    if f0 <= 0.0 {
        return Err(Error::TrivialInstance {
            norm: q.label(),
            b_norm: f0 + inst.sigma,
            sigma: inst.sigma,
        });
    }
    let f1 = f(1.0);
    if f1.abs() <= ALPHA_TOL {
        return Ok(1.0);
    }
    if f1 > 0.0 {
        return Err(Error::NotFeasible {
            residual: f1 + inst.sigma,
            sigma: inst.sigma,
        });
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm.abs() <= ALPHA_TOL {
            return Ok(mid);
        }
        if fm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * hi {
            break;
        }
    }
    Ok(hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_matrix_small() {
        let s = build_sign_matrix(2).unwrap();
        assert_eq!(
            s.u,
            DMatrix::from_row_slice(4, 2, &[1.0, 1.0, 1.0, -1.0, -1.0, 1.0, -1.0, -1.0])
        );
        assert_eq!(
            build_sign_matrix(1).unwrap().u,
            DMatrix::from_row_slice(2, 1, &[1.0, -1.0])
        );
        let s3 = build_sign_matrix(3).unwrap().u;
        for k in 0..8 {
            assert_eq!(s3.row(k), -s3.row(7 - k));
        }
        assert!(matches!(build_sign_matrix(17), Err(Error::TooLarge { .. })));
        assert!(build_sign_matrix(0).is_err());
    }

    #[test]
    fn halfspaces_with_zero_sigma_give_equalities() {
        let inst = ProblemInstance::example_2x3(0.5).with_sigma(0.0);
        let (a_t, b_t) = l1_ball_halfspaces(&inst).unwrap();
        assert_eq!(a_t.nrows(), 4);
        // rows 0 and 3 are negations, so A x = b is forced
        let on = DVector::from_vec(vec![3.0, 0.0, 0.0]);
        assert!((&a_t * &on - &b_t).iter().all(|v| *v <= 1e-12));
        let off = DVector::from_vec(vec![3.0, 0.0, 1e-6]);
        assert!((&a_t * &off - &b_t).iter().any(|v| *v > 0.0));
    }

    #[test]
    fn sandwich_at_origin() {
        let inst = ProblemInstance::example_2x3(0.5);
        let c = residual_sandwich_check(&inst, &DVector::zeros(3)).unwrap();
        assert!((c.rhs - 5.0).abs() < 1e-12);
        assert!((c.mid - 5.0).abs() < 1e-12);
        assert!((c.lhs - 2.5).abs() < 1e-12);
        assert!(c.holds);
        let feasible = DVector::from_vec(vec![2.5, 0.0, 0.0]);
        let c = residual_sandwich_check(&inst, &feasible).unwrap();
        assert_eq!((c.lhs, c.mid, c.rhs), (0.0, 0.0, 0.0));
        assert!(c.holds);
    }

    #[test]
    fn alpha_examples() {
        let inst = ProblemInstance::example_2x3(0.5);
        let a = boundary_scaling_alpha(&inst, &DVector::from_vec(vec![3.0, 0.0, 0.0]), Norm::L1)
            .unwrap();
        assert!((a - 5.0 / 6.0).abs() < 1e-10);
        let edge = DVector::from_vec(vec![2.5, 0.0, 0.0]);
        assert_eq!(boundary_scaling_alpha(&inst, &edge, Norm::L1).unwrap(), 1.0);
        let far = DVector::from_vec(vec![10.0, 0.0, 0.0]);
        assert!(matches!(
            boundary_scaling_alpha(&inst, &far, Norm::L1),
            Err(Error::NotFeasible { .. })
        ));
        let x = DVector::from_vec(vec![1.5, 1.5, 0.0]);
        let a = boundary_scaling_alpha(&inst, &x, Norm::L2).unwrap();
        assert!((inst.residual_norm(&(x * a), Norm::L2) - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn one_dimensional() {
        let inst = ProblemInstance::from_row_major(1, 1, &[1.0], &[3.0], 1.0, 0.5).unwrap();
        let sol = solve_exact_lp_quasinorm(&inst, 0.7).unwrap();
        assert_eq!(sol.minimizers.len(), 1);
        assert!((sol.minimizers[0][0] - 2.0).abs() < 1e-12);
        assert!((sol.optimal_value - 2f64.powf(0.7)).abs() < 1e-12);
    }

    #[test]
    fn square_noiseless_system() {
        let inst =
            ProblemInstance::from_row_major(2, 2, &[2.0, 1.0, 1.0, 3.0], &[3.0, 5.0], 0.0, 0.5)
                .unwrap();
        let pts = all_extreme_points(&inst).unwrap();
        assert_eq!(pts.len(), 1);
        // A^{-1} b = (0.8, 1.4)
        assert!((pts[0][0] - 0.8).abs() < 1e-12 && (pts[0][1] - 1.4).abs() < 1e-12);
        let l0 = solve_exact_l0(&inst).unwrap();
        assert_eq!(l0.optimal_value, 2.0);
        let v = enumerate_orthant_vertices(&inst, &[1, 1]).unwrap();
        assert_eq!(v.vertices.len(), 1);
        assert!(enumerate_orthant_vertices(&inst, &[1, -1])
            .unwrap()
            .vertices
            .is_empty());
    }

    #[test]
    fn trivial_l0() {
        let inst = ProblemInstance::example_2x3(0.5).with_sigma(6.0);
        let l0 = solve_exact_l0(&inst).unwrap();
        assert_eq!(l0.optimal_value, 0.0);
        assert_eq!(l0.minimizers, vec![vec![0.0; 3]]);
    }

    #[test]
    fn size_guards() {
        let inst = ProblemInstance::from_row_major(1, 9, &[1.0; 9], &[1.0], 0.1, 0.5).unwrap();
        assert!(matches!(
            all_extreme_points(&inst),
            Err(Error::TooLarge { .. })
        ));
        assert!(solve_exact_l0(&inst).is_ok());
    }
}
