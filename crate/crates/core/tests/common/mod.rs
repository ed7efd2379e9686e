//! Randomized property suites shared by the property tests and the acceptance run.
//!
//! Each suite returns a one-line summary on success and a description of the first
//! violation otherwise.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sparselp::config::NpgParams;
use sparselp::instance::ProblemInstance;
use sparselp::linalg::{lq_norm, spectral_norm_sq};
use sparselp::npg::CompositeProblem;
use sparselp::oracle::residual_sandwich_check;
use sparselp::prox::{prox_objective, prox_scalar};
use sparselp::smoothing::{g_plus, h_sum, penalty_smooth, L1SmoothPenalty};
use sparselp::SmoothingParams;

pub type Suite = Result<String, String>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_matrix(r: &mut ChaCha8Rng, m: usize, n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(m, n, |_, _| r.sample(StandardNormal))
}

pub fn gaussian_vector(r: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| r.sample(StandardNormal))
}

/// Gaussian `A` and `b` with `sigma` a random fraction of `||b||_1`.
pub fn random_instance(r: &mut ChaCha8Rng, m: usize, n: usize, p: f64) -> ProblemInstance {
    let a = gaussian_matrix(r, m, n);
    let b = gaussian_vector(r, m) * 2.0;
    let sigma = r.gen_range(0.1..0.6) * b.lp_norm(1);
    ProblemInstance { a, b, sigma, p }
}

/// `0 <= g_mu(s) - (s)_+ <= mu/8` and `0 <= H_nu(Ax - b) - ||Ax - b||_1 <= m nu / 4`.
pub fn smoothing_envelopes(draws: usize) -> Suite {
    let mut r = rng(101);
    for _ in 0..draws {
        let mu = 10f64.powf(r.gen_range(-4.0..1.0));
        let s = r.gen_range(-2.0..2.0) * mu;
        let (g, _) = g_plus(s, mu).map_err(|e| e.to_string())?;
        let gap = g - s.max(0.0);
        let slack = 1e-15 * (1.0 + s.abs() + mu);
        if gap < -slack || gap > mu / 8.0 + slack {
            return Err(format!("g envelope: s={s:e} mu={mu:e} gap={gap:e}"));
        }
    }
    for k in 0..draws {
        let m = 1 + k % 12;
        let n = 1 + (k / 7) % 9;
        let inst = random_instance(&mut r, m, n, 0.5);
        let x = gaussian_vector(&mut r, n);
        let nu = 10f64.powf(r.gen_range(-4.0..1.0));
        let res = inst.residual(&x);
        let l1 = res.lp_norm(1);
        let gap = h_sum(res.as_slice(), nu) - l1;
        let slack = 1e-14 * (1.0 + l1);
        if gap < -slack || gap > m as f64 * nu / 4.0 + slack {
            return Err(format!("H envelope: m={m} nu={nu:e} gap={gap:e}"));
        }
    }
    Ok(format!(
        "{draws} g draws and {draws} H draws inside both envelopes"
    ))
}

/// Penalty gradient against central differences at `points` points on each of `instances` instances.
pub fn penalty_gradient_fd(instances: usize, points: usize, rel_tol: f64) -> Suite {
    let mut r = rng(202);
    let mut worst = 0.0f64;
    for i in 0..instances {
        let m = 2 + i % 5;
        let n = 2 + (i * 3) % 7;
        let inst = random_instance(&mut r, m, n, 0.5);
        for _ in 0..points {
            let sp = SmoothingParams::new(
                r.gen_range(0.5..5.0),
                r.gen_range(0.05..1.0),
                r.gen_range(0.05..1.0),
            )
            .map_err(|e| e.to_string())?;
            let x = gaussian_vector(&mut r, n);
            let (_, grad) = penalty_smooth(&x, &inst, &sp).map_err(|e| e.to_string())?;
            let h = 1e-6;
            let fd = DVector::from_fn(n, |j, _| {
                let mut xp = x.clone();
                let mut xm = x.clone();
                xp[j] += h;
                xm[j] -= h;
                let fp = penalty_smooth(&xp, &inst, &sp).unwrap().0;
                let fm = penalty_smooth(&xm, &inst, &sp).unwrap().0;
                (fp - fm) / (2.0 * h)
            });
            let err = (&grad - &fd).norm() / grad.norm().max(1.0);
            worst = worst.max(err);
            if err > rel_tol {
                return Err(format!("instance {i}: relative gradient error {err:e}"));
            }
        }
    }
    Ok(format!(
        "{} gradients, worst relative error {worst:.1e}",
        instances * points
    ))
}

/// Global minimizer of `|t|^p + (w/2)(t - v)^2` by a dense grid on `[0, |v|]` and golden
/// section on the objective difference to the best grid point.
pub fn prox_grid_oracle(v: f64, w: f64, p: f64) -> f64 {
    let av = v.abs();
    if av == 0.0 {
        return 0.0;
    }
    let points = 20_000;
    let step = av / points as f64;
    let f = |t: f64| prox_objective(t, av, w, p);
    let (mut best_k, mut best_f) = (0usize, f(0.0));
    for k in 1..=points {
        let fk = f(k as f64 * step);
        if fk < best_f {
            best_k = k;
            best_f = fk;
        }
    }
    if best_k == 0 {
        return 0.0;
    }
    let t0 = best_k as f64 * step;
    // f(t) - f(t0) without cancellation
    let diff = |t: f64| {
        t0.powf(p) * (p * ((t - t0) / t0).ln_1p()).exp_m1()
            + 0.5 * w * (t - t0) * (t + t0 - 2.0 * av)
    };
    let (mut lo, mut hi) = ((t0 - step).max(0.5 * t0), (t0 + step).min(av));
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        if diff(a) < diff(b) {
            hi = b;
        } else {
            lo = a;
        }
        if hi - lo < 1e-15 * (1.0 + t0) {
            break;
        }
    }
    let t = 0.5 * (lo + hi);
    // the zero candidate may still win
    if prox_objective(t, av, w, p) < f(0.0) {
        t.copysign(v)
    } else {
        0.0
    }
}

pub fn prox_vs_oracle(cases: usize, tol: f64) -> Suite {
    let mut r = rng(303);
    let mut worst = 0.0f64;
    for k in 0..cases {
        // p cycles through 0.1, ..., 0.9
        let p = 0.1 * (1 + k % 9) as f64;
        let w = 10f64.powf(r.gen_range(-1.0..1.0));
        let v = r.gen_range(-10.0..10.0);
        let t = prox_scalar(v, w, p).map_err(|e| e.to_string())?;
        let o = prox_grid_oracle(v, w, p);
        let dev = (t - o).abs();
        if dev > tol {
            // accept either side of an exact tie between zero and the nonzero branch
            let (ft, fo) = (prox_objective(t, v, w, p), prox_objective(o, v, w, p));
            if (ft - fo).abs() > 1e-12 * (1.0 + fo.abs()) {
                return Err(format!("v={v} w={w} p={p}: prox {t} vs oracle {o}"));
            }
        }
        worst = worst.max(dev);
    }
    Ok(format!("{cases} cases, max deviation {worst:.1e}"))
}

/// `2^(1-m) ||(U r - sigma)_+||_1 <= (||r||_1 - sigma)_+ <= ||(U r - sigma)_+||_1` over all
/// sign vectors `U`, checked both through the library and by direct enumeration.
pub fn residual_sandwich(points: usize) -> Suite {
    let mut r = rng(404);
    for k in 0..points {
        let m = 1 + k % 6;
        let n = 1 + k % 4;
        let inst = random_instance(&mut r, m, n, 0.5);
        let x = gaussian_vector(&mut r, n) * 2.0;
        let c = residual_sandwich_check(&inst, &x).map_err(|e| e.to_string())?;
        if !c.holds {
            return Err(format!("library check failed: {c:?}"));
        }
        let res = inst.residual(&x);
        let mid = (res.lp_norm(1) - inst.sigma).max(0.0);
        let mut rhs = 0.0;
        for mask in 0u32..1 << m {
            let dot: f64 = (0..m)
                .map(|i| if mask >> i & 1 == 1 { -res[i] } else { res[i] })
                .sum();
            rhs += (dot - inst.sigma).max(0.0);
        }
        let lhs = rhs * 2f64.powi(1 - m as i32);
        let tol = 1e-12 * (1.0 + rhs);
        if lhs > mid + tol || mid > rhs + tol {
            return Err(format!("m={m}: {lhs} <= {mid} <= {rhs} fails"));
        }
        if (c.rhs - rhs).abs() > tol || (c.mid - mid).abs() > tol {
            return Err(format!(
                "library sandwich terms differ: {c:?} vs ({lhs}, {mid}, {rhs})"
            ));
        }
    }
    Ok(format!("{points} points, no violations"))
}

/// `n^min(1/q-1/2,0) ||x||_2 <= ||x||_q <= n^max(1/q-1/2,0) ||x||_2` for q in {1, 2, inf}.
pub fn norm_sandwich(vectors: usize) -> Suite {
    let mut r = rng(505);
    for k in 0..vectors {
        let n = 1 + k % 32;
        let x = gaussian_vector(&mut r, n) * 10f64.powf(r.gen_range(-3.0..3.0));
        let l2 = x.norm();
        for q in [1.0, 2.0, f64::INFINITY] {
            let e = 1.0 / q - 0.5;
            let nq = lq_norm(x.as_slice(), q).map_err(|e| e.to_string())?;
            let lo = (n as f64).powf(e.min(0.0)) * l2;
            let hi = (n as f64).powf(e.max(0.0)) * l2;
            let slack = 1e-12 * l2;
            if nq - lo < -slack || hi - nq < -slack {
                return Err(format!("n={n} q={q}: {lo} <= {nq} <= {hi} fails"));
            }
        }
    }
    Ok(format!("{vectors} vectors x 3 norms, no violations"))
}

/// Every accepted inner step satisfies the nonmonotone decrease test, and the returned
/// point does not increase the objective.
pub fn npg_descent(instances: usize) -> Suite {
    let mut r = rng(606);
    let params = NpgParams::default();
    let mut steps = 0;
    for i in 0..instances {
        let m = 5 + i % 10;
        let n = 2 * m + i % 7;
        let p = r.gen_range(0.1..0.9);
        let inst = random_instance(&mut r, m, n, p);
        let sp = SmoothingParams::new(
            10f64.powf(r.gen_range(0.0..3.0)),
            10f64.powf(r.gen_range(-4.0..0.0)),
            10f64.powf(r.gen_range(-4.0..0.0)),
        )
        .map_err(|e| e.to_string())?;
        let penalty = L1SmoothPenalty {
            sigma: inst.sigma,
            params: sp,
        };
        let problem = CompositeProblem {
            a: &inst.a,
            b: &inst.b,
            penalty: &penalty,
            p: inst.p,
        };
        let x0 = gaussian_vector(&mut r, n);
        let out = problem
            .minimize(x0.clone(), 1e-6, &params, spectral_norm_sq(&inst.a), true)
            .map_err(|e| format!("instance {i}: {e}"))?;
        for rec in &out.trace {
            let bound = rec.f_ref - 0.5 * params.c * rec.step_norm * rec.step_norm;
            if rec.f > bound + 1e-12 * (1.0 + rec.f_ref.abs()) {
                return Err(format!(
                    "instance {i} step {}: F = {} above {bound}",
                    rec.iter, rec.f
                ));
            }
            if rec.f_ref > out.f_initial + 1e-12 * (1.0 + out.f_initial.abs()) {
                return Err(format!("instance {i}: reference value above F(x0)"));
            }
        }
        let f_final = problem.objective(&out.x_final);
        if f_final > out.f_initial + 1e-12 * (1.0 + out.f_initial.abs()) {
            return Err(format!(
                "instance {i}: F(x_final) = {f_final} > F(x0) = {}",
                out.f_initial
            ));
        }
        steps += out.trace.len();
    }
    Ok(format!(
        "{instances} inner solves, {steps} accepted steps, no violations"
    ))
}

/// All property suites at the acceptance sizes, in order.
pub fn all_property_suites() -> Vec<(&'static str, Suite)> {
    vec![
        ("smoothing envelopes", smoothing_envelopes(10_000)),
        ("penalty gradient", penalty_gradient_fd(10, 100, 1e-5)),
        ("prox oracle", prox_vs_oracle(1_000, 1e-7)),
        ("residual sandwich", residual_sandwich(1_000)),
        ("norm sandwich", norm_sandwich(10_000)),
        ("npg descent", npg_descent(10)),
    ]
}
