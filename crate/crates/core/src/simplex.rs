//! Dense two-phase simplex with Bland's rule for small LPs
//! `min c^T x  s.t.  A x <= b`, `x` free.
//!
//! Free variables are split as `x = x+ - x-`. Rows with negative right-hand side get
//! an artificial variable for phase one. The tableau is generic over the scalar so the
//! same pivot sequence can be replayed in exact arithmetic.

use std::ops::{Add, Div, Mul, Neg, Sub};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

pub const MAX_ROWS: usize = 200;
pub const MAX_COLS: usize = 40;
const PIVOT_CAP: usize = 100_000;

pub trait LpScalar:
    Clone
    + PartialOrd
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn zero() -> Self;
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;
    /// Values within this band of zero are treated as zero by the pivot rules.
    fn tol() -> Self;
}

impl LpScalar for f64 {
    fn zero() -> Self {
        0.0
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn tol() -> Self {
        1e-11
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Original (unsplit) variables; meaningful only when optimal.
    pub x: Vec<f64>,
    pub value: f64,
    /// `(row, column)` of every pivot, in order.
    pub pivots: Vec<(usize, usize)>,
}

/// Constraint rows of the standard-form tableau plus bookkeeping.
#[derive(Clone, Debug)]
pub struct Tableau<T> {
    /// `rows x (cols + 1)`; the last column is the right-hand side.
    pub t: Vec<Vec<T>>,
    pub basis: Vec<usize>,
    /// Number of split structural columns (`2n`).
    pub n_struct: usize,
    /// First artificial column; columns from here on are artificial.
    pub art_start: usize,
    pub cols: usize,
    /// Phase-two costs over all columns.
    pub cost: Vec<T>,
}

impl<T: LpScalar> Tableau<T> {
    pub fn build(c: &[f64], a: &DMatrix<f64>, b: &[f64]) -> Self {
        let (m, n) = a.shape();
        let n_struct = 2 * n;
        let negative: Vec<bool> = b.iter().map(|v| *v < 0.0).collect();
        let n_art = negative.iter().filter(|v| **v).count();
        let art_start = n_struct + m;
        let cols = art_start + n_art;
        let mut t = vec![vec![T::zero(); cols + 1]; m];
        let mut basis = vec![0; m];
        let mut next_art = art_start;
        let one = T::from_f64(1.0);
        for i in 0..m {
            // rows with b_i < 0 are negated so the right-hand side is nonnegative
            let flip = if negative[i] { -1.0 } else { 1.0 };
            for j in 0..n {
                let v = flip * a[(i, j)];
                t[i][j] = T::from_f64(v);
                t[i][n + j] = T::from_f64(-v);
            }
            t[i][n_struct + i] = T::from_f64(flip);
            t[i][cols] = T::from_f64(flip * b[i]);
            if negative[i] {
                t[i][next_art] = one.clone();
                basis[i] = next_art;
                next_art += 1;
            } else {
                basis[i] = n_struct + i;
            }
        }
        let mut cost = vec![T::zero(); cols];
        for j in 0..n {
            cost[j] = T::from_f64(c[j]);
            cost[n + j] = T::from_f64(-c[j]);
        }
        Self {
            t,
            basis,
            n_struct,
            art_start,
            cols,
            cost,
        }
    }

    pub fn rows(&self) -> usize {
        self.t.len()
    }

    pub fn pivot(&mut self, r: usize, c: usize) {
        let width = self.cols + 1;
        let p = self.t[r][c].clone();
        for j in 0..width {
            self.t[r][j] = self.t[r][j].clone() / p.clone();
        }
        let pivot_row = self.t[r].clone();
        for i in 0..self.rows() {
            if i == r {
                continue;
            }
            let f = self.t[i][c].clone();
            if f == T::zero() {
                continue;
            }
            for j in 0..width {
                self.t[i][j] = self.t[i][j].clone() - f.clone() * pivot_row[j].clone();
            }
        }
        self.basis[r] = c;
    }

    /// Reduced costs for the given column costs under the current basis.
    pub fn reduced_costs(&self, cost: &[T]) -> Vec<T> {
        let mut d = cost.to_vec();
        d.push(T::zero());
        for (i, &bj) in self.basis.iter().enumerate() {
            let cb = cost[bj].clone();
            if cb == T::zero() {
                continue;
            }
            for (j, dj) in d.iter_mut().enumerate() {
                *dj = dj.clone() - cb.clone() * self.t[i][j].clone();
            }
        }
        d
    }

    /// Structural solution `x = x+ - x-` for the current basis.
    pub fn solution(&self) -> Vec<T> {
        let n = self.n_struct / 2;
        let mut split = vec![T::zero(); self.n_struct];
        for (i, &bj) in self.basis.iter().enumerate() {
            if bj < self.n_struct {
                split[bj] = self.t[i][self.cols].clone();
            }
        }
        (0..n)
            .map(|j| split[j].clone() - split[n + j].clone())
            .collect()
    }

    /// Bland's rule iterations on `cost` with entering columns limited to `< allowed`.
    fn optimize(
        &mut self,
        cost: &[T],
        allowed: usize,
        pivots: &mut Vec<(usize, usize)>,
    ) -> LpStatus {
        let tol = T::tol();
        let neg_tol = -tol.clone();
        for _ in 0..PIVOT_CAP {
            let d = self.reduced_costs(cost);
            let Some(enter) = (0..allowed).find(|&j| d[j] < neg_tol) else {
                return LpStatus::Optimal;
            };
            let mut leave: Option<(usize, T)> = None;
            for i in 0..self.rows() {
                let a = self.t[i][enter].clone();
                if a > tol {
                    let ratio = self.t[i][self.cols].clone() / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            let better = ratio < lr.clone() - tol.clone()
                                || (!(ratio > lr.clone() + tol.clone())
                                    && self.basis[i] < self.basis[li]);
                            if better {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return LpStatus::Unbounded;
            };
            self.pivot(r, enter);
            pivots.push((r, enter));
        }
        panic!("simplex exceeded {PIVOT_CAP} pivots under Bland's rule");
    }
}

/// Runs both phases; returns the status, the final tableau and the pivot sequence.
pub fn lp_solve_generic<T: LpScalar>(
    c: &[f64],
    a: &DMatrix<f64>,
    b: &[f64],
) -> (LpStatus, Tableau<T>, Vec<(usize, usize)>) {
    let mut tab = Tableau::<T>::build(c, a, b);
    let mut pivots = Vec::new();
    let cols = tab.cols;

    if tab.art_start < cols {
        let mut phase1 = vec![T::zero(); cols];
        for v in phase1.iter_mut().skip(tab.art_start) {
            *v = T::from_f64(1.0);
        }
        tab.optimize(&phase1, cols, &mut pivots);
        let infeas = tab
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &bj)| bj >= tab.art_start)
            .fold(T::zero(), |acc, (i, _)| acc + tab.t[i][cols].clone());
        if infeas > T::tol() {
            return (LpStatus::Infeasible, tab, pivots);
        }
        // drive zero-level artificials out of the basis where possible
        for i in 0..tab.rows() {
            if tab.basis[i] < tab.art_start {
                continue;
            }
            let tol = T::tol();
            let pick = (0..tab.art_start).find(|&j| {
                let v = tab.t[i][j].clone();
                v > tol.clone() || v < -tol.clone()
            });
            if let Some(j) = pick {
                tab.pivot(i, j);
                pivots.push((i, j));
            }
        }
    }
    let cost = tab.cost.clone();
    let allowed = tab.art_start;
    let status = tab.optimize(&cost, allowed, &mut pivots);
    (status, tab, pivots)
}

/// `min c^T x  s.t.  a_ub x <= b_ub` with `x` free.
pub fn lp_solve_small(c: &[f64], a_ub: &DMatrix<f64>, b_ub: &[f64]) -> Result<LpSolution> {
    let (m, n) = a_ub.shape();
    if c.len() != n || b_ub.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "LP with {m}x{n} constraints, |c| = {}, |b| = {}",
            c.len(),
            b_ub.len()
        )));
    }
    if m > MAX_ROWS {
        return Err(Error::TooLarge {
            what: format!("LP row count {m}"),
            limit: MAX_ROWS,
        });
    }
    if n > MAX_COLS {
        return Err(Error::TooLarge {
            what: format!("LP column count {n}"),
            limit: MAX_COLS,
        });
    }
    if c.iter()
        .chain(b_ub)
        .chain(a_ub.iter())
        .any(|v| !v.is_finite())
    {
        return Err(Error::NonFinite("LP data"));
    }
    let (status, tab, pivots) = lp_solve_generic::<f64>(c, a_ub, b_ub);
    let (x, value) = if status == LpStatus::Optimal {
        let x = tab.solution();
        let value = x.iter().zip(c).map(|(a, b)| a * b).sum();
        (x, value)
    } else {
        (vec![f64::NAN; n], f64::NAN)
    };
    Ok(LpSolution {
        status,
        x,
        value,
        pivots,
    })
}

/// `min_x ||A x - b||_1` through the epigraph LP; returns the minimizer and the value.
pub fn l1_regression(a: &DMatrix<f64>, b: &[f64]) -> Result<(Vec<f64>, f64)> {
    let (m, k) = a.shape();
    // variables (x, t): A x - t <= b, -A x - t <= -b, minimize sum t
    let mut g = DMatrix::zeros(2 * m, k + m);
    let mut h = vec![0.0; 2 * m];
    for i in 0..m {
        for j in 0..k {
            g[(i, j)] = a[(i, j)];
            g[(m + i, j)] = -a[(i, j)];
        }
        g[(i, k + i)] = -1.0;
        g[(m + i, k + i)] = -1.0;
        h[i] = b[i];
        h[m + i] = -b[i];
    }
    let mut c = vec![0.0; k + m];
    for v in c.iter_mut().skip(k) {
        *v = 1.0;
    }
    let sol = lp_solve_small(&c, &g, &h)?;
    match sol.status {
        LpStatus::Optimal => {
            let x = sol.x[..k].to_vec();
            let r = a * nalgebra::DVector::from_column_slice(&x)
                - nalgebra::DVector::from_column_slice(b);
            Ok((x, r.lp_norm(1)))
        }
        // the epigraph LP is always feasible and bounded below by zero
        other => unreachable!("L1 regression LP returned {other:?}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::{BigInt, BigRational, Signed, ToPrimitive, Zero};
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;

    impl LpScalar for BigRational {
        fn zero() -> Self {
            <BigRational as Zero>::zero()
        }
        fn from_f64(v: f64) -> Self {
            BigRational::from_float(v).expect("finite")
        }
        fn to_f64(&self) -> f64 {
            ToPrimitive::to_f64(self).expect("representable")
        }
        fn tol() -> Self {
            <BigRational as Zero>::zero()
        }
    }

    fn col(v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_column_slice(v.len(), 1, v)
    }

    #[test]
    fn interval() {
        // min x s.t. -x <= -2, x <= 5
        let sol = lp_solve_small(&[1.0], &col(&[-1.0, 1.0]), &[-2.0, 5.0]).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.x[0] - 2.0).abs() < 1e-12);
        assert!((sol.value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible() {
        // x <= 0 and x >= 1
        let sol = lp_solve_small(&[1.0], &col(&[1.0, -1.0]), &[0.0, -1.0]).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded() {
        let sol = lp_solve_small(&[-1.0], &col(&[-1.0]), &[0.0]).unwrap();
        assert_eq!(sol.status, LpStatus::Unbounded);
    }

    #[test]
    fn one_dimensional_l1_regression() {
        // min |x - 3| + |x - 3|
        let (x, v) = l1_regression(&col(&[1.0, 1.0]), &[3.0, 3.0]).unwrap();
        assert!((x[0] - 3.0).abs() < 1e-12);
        assert!(v.abs() < 1e-12);
        // weighted median: min |x - 1| + |x - 2| + |x - 10| at x = 2
        let (x, v) = l1_regression(&col(&[1.0, 1.0, 1.0]), &[1.0, 2.0, 10.0]).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-12);
        assert!((v - 9.0).abs() < 1e-12);
    }

    #[test]
    fn size_caps() {
        let a = DMatrix::zeros(201, 1);
        assert!(matches!(
            lp_solve_small(&[0.0], &a, &vec![0.0; 201]),
            Err(Error::TooLarge { .. })
        ));
        let a = DMatrix::zeros(1, 41);
        assert!(matches!(
            lp_solve_small(&vec![0.0; 41], &a, &[0.0]),
            Err(Error::TooLarge { .. })
        ));
    }

    fn random_lp(rng: &mut impl Rng) -> (Vec<f64>, DMatrix<f64>, Vec<f64>) {
        let n = rng.gen_range(1..=4);
        let m = rng.gen_range(n..=8);
        // small integers keep the exact re-solve cheap
        let a = DMatrix::from_fn(m, n, |_, _| rng.gen_range(-5..=5) as f64);
        let b: Vec<f64> = (0..m).map(|_| rng.gen_range(-4..=9) as f64).collect();
        let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-3..=3) as f64).collect();
        (c, a, b)
    }

    #[test]
    fn agrees_with_exact_arithmetic() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let mut optimal = 0;
        for _ in 0..100 {
            let (c, a, b) = random_lp(&mut rng);
            let sol = lp_solve_small(&c, &a, &b).unwrap();

            // replay the floating-point pivot path with exact fractions
            let mut exact = Tableau::<BigRational>::build(&c, &a, &b);
            for &(r, k) in &sol.pivots {
                exact.pivot(r, k);
            }
            // independent exact solve, possibly along another path
            let (status, tab, _) = lp_solve_generic::<BigRational>(&c, &a, &b);
            assert_eq!(status, sol.status);
            if sol.status != LpStatus::Optimal {
                continue;
            }
            optimal += 1;
            let cost = exact.cost.clone();
            let d = exact.reduced_costs(&cost);
            let cols = exact.cols;
            for j in 0..exact.art_start {
                assert!(!d[j].is_negative(), "replayed basis not optimal");
            }
            for row in &exact.t {
                assert!(!row[cols].is_negative(), "replayed basis not feasible");
            }
            let x_exact = exact.solution();
            for (xe, xf) in x_exact.iter().zip(&sol.x) {
                assert!((LpScalar::to_f64(xe) - xf).abs() < 1e-9);
            }
            let value_exact: BigRational = tab.solution().iter().zip(&c).fold(
                <BigRational as Zero>::zero(),
                |acc, (x, ci)| {
                    acc + x.clone() * BigRational::from_integer(BigInt::from(*ci as i64))
                },
            );
            assert!((LpScalar::to_f64(&value_exact) - sol.value).abs() < 1e-9);
        }
        assert!(optimal >= 20, "only {optimal} optimal cases");
    }
}
