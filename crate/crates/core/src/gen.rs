//! Seeded random instances: unit-norm Gaussian columns, an `s`-sparse Gaussian signal
//! and additive noise scaled by `delta`.
//!
//! All randomness comes from one ChaCha20 stream seeded with `seed_from_u64(seed)`,
//! consumed in this order: the entries of `A` row by row, the support, the signal values
//! in increasing index order, then the noise entries.

use std::fmt;
use std::str::FromStr;

use log::warn;
use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{validate_instance, Norm, ProblemInstance, SupportSet};

/// Noise family for `xi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NoiseKind {
    #[serde(rename = "gauss")]
    Gaussian,
    /// Student's t with 2 degrees of freedom.
    #[serde(rename = "t2")]
    StudentT2,
}

impl NoiseKind {
    pub fn label(self) -> &'static str {
        match self {
            NoiseKind::Gaussian => "gauss",
            NoiseKind::StudentT2 => "t2",
        }
    }
}

impl fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gauss" | "gaussian" => Ok(NoiseKind::Gaussian),
            "t2" => Ok(NoiseKind::StudentT2),
            other => Err(Error::param(format!("unknown noise family {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub m: usize,
    pub n: usize,
    pub s: usize,
    pub delta: f64,
    pub noise: NoiseKind,
    pub seed: u64,
    /// Norm used for `sigma = delta ||xi||_q`; 1 or 2.
    pub q_for_sigma: Norm,
    /// Exponent stored in the generated instance.
    pub p: f64,
}

impl GenSpec {
    pub fn new(m: usize, n: usize, s: usize, delta: f64, noise: NoiseKind, seed: u64) -> Self {
        Self {
            m,
            n,
            s,
            delta,
            noise,
            seed,
            q_for_sigma: Norm::L1,
            p: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 || self.n == 0 {
            return Err(Error::DimensionMismatch(format!(
                "m = {}, n = {}",
                self.m, self.n
            )));
        }
        if self.s == 0 || self.s > self.n {
            return Err(Error::param(format!(
                "sparsity s = {} outside [1, n = {}]",
                self.s, self.n
            )));
        }
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(Error::param(format!(
                "delta = {} must be nonnegative",
                self.delta
            )));
        }
        if self.q_for_sigma == Norm::Inf {
            return Err(Error::param("sigma norm must be 1 or 2"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct GeneratedInstance {
    pub inst: ProblemInstance,
    pub x_hat: DVector<f64>,
    pub xi: DVector<f64>,
    pub support: SupportSet,
    /// Seed actually used; differs from the requested one after reseeding.
    pub seed_used: u64,
}

pub fn rng_from_seed(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

/// Standard normal draws (ziggurat method on the generator's 64-bit outputs).
pub fn sample_gaussian<R: Rng + ?Sized>(count: usize, rng: &mut R) -> DVector<f64> {
    DVector::from_fn(count, |_, _| StandardNormal.sample(rng))
}

/// t(2) draws as `Z / sqrt(V / 2)` with `Z` standard normal and `V` chi-square(2).
pub fn sample_t2<R: Rng + ?Sized>(count: usize, rng: &mut R) -> DVector<f64> {
    let chi = ChiSquared::new(2.0).expect("2 degrees of freedom");
    DVector::from_fn(count, |_, _| {
        let z: f64 = StandardNormal.sample(rng);
        let v: f64 = chi.sample(rng);
        z / (0.5 * v).sqrt()
    })
}

fn draw(spec: &GenSpec, seed: u64) -> GeneratedInstance {
    let mut rng = rng_from_seed(seed);
    let (m, n) = (spec.m, spec.n);
    let mut a = DMatrix::zeros(m, n);
    for i in 0..m {
        for j in 0..n {
            a[(i, j)] = StandardNormal.sample(&mut rng);
        }
    }
    for mut col in a.column_iter_mut() {
        let nrm = col.norm();
        if nrm > 0.0 {
            col /= nrm;
        }
    }
    let mut idx = sample(&mut rng, n, spec.s).into_vec();
    idx.sort_unstable();
    let mut x_hat = DVector::zeros(n);
    for &j in &idx {
        x_hat[j] = StandardNormal.sample(&mut rng);
    }
    let xi = match spec.noise {
        NoiseKind::Gaussian => sample_gaussian(m, &mut rng),
        NoiseKind::StudentT2 => sample_t2(m, &mut rng),
    };
    let b = &a * &x_hat + &xi * spec.delta;
    let sigma = spec.delta * spec.q_for_sigma.of(xi.as_slice());
    GeneratedInstance {
        inst: ProblemInstance {
            a,
            b,
            sigma,
            p: spec.p,
        },
        x_hat,
        xi,
        support: SupportSet::from_indices(idx, n).expect("sampled indices are in range"),
        seed_used: seed,
    }
}

/// Draws an instance; reseeds with `seed + 1, seed + 2, ...` while `||b||_q <= sigma`.
pub fn gen_instance(spec: &GenSpec) -> Result<GeneratedInstance> {
    spec.validate()?;
    let mut seed = spec.seed;
    for _ in 0..64 {
        let out = draw(spec, seed);
        match validate_instance(&out.inst, spec.q_for_sigma) {
            Ok(()) => return Ok(out),
            Err(Error::TrivialInstance { b_norm, sigma, .. }) => {
                warn!(
                    "seed {seed}: ||b|| = {b_norm:e} <= sigma = {sigma:e}, reseeding with {}",
                    seed.wrapping_add(1)
                );
                seed = seed.wrapping_add(1);
            }
            Err(e) => return Err(e),
        }
    }
    Err(Error::param(format!(
        "no nontrivial instance within 64 reseeds from seed {}",
        spec.seed
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::numerical_rank;

    fn spec(noise: NoiseKind) -> GenSpec {
        GenSpec::new(20, 50, 4, 1e-2, noise, 7)
    }

    #[test]
    fn columns_have_unit_norm() {
        let g = gen_instance(&spec(NoiseKind::Gaussian)).unwrap();
        for col in g.inst.a.column_iter() {
            assert!((col.norm() - 1.0).abs() < 1e-12);
        }
        assert_eq!(numerical_rank(&g.inst.a, 1e-10), 20);
    }

    #[test]
    fn planted_signal_sits_on_the_boundary() {
        for noise in [NoiseKind::Gaussian, NoiseKind::StudentT2] {
            for q in [Norm::L1, Norm::L2] {
                let mut sp = spec(noise);
                sp.q_for_sigma = q;
                let g = gen_instance(&sp).unwrap();
                let r = g.inst.residual_norm(&g.x_hat, q);
                assert!(
                    (r - g.inst.sigma).abs() <= 1e-12 * (1.0 + g.inst.sigma),
                    "{r} vs {}",
                    g.inst.sigma
                );
                assert_eq!(SupportSet::of(g.x_hat.as_slice()), g.support);
                assert_eq!(g.support.len(), 4);
            }
        }
    }

    #[test]
    fn noiseless() {
        let mut sp = spec(NoiseKind::Gaussian);
        sp.delta = 0.0;
        let g = gen_instance(&sp).unwrap();
        assert_eq!(g.inst.sigma, 0.0);
        assert_eq!(g.inst.b, &g.inst.a * &g.x_hat);
    }

    #[test]
    fn deterministic() {
        let a = gen_instance(&spec(NoiseKind::StudentT2)).unwrap();
        let b = gen_instance(&spec(NoiseKind::StudentT2)).unwrap();
        assert_eq!(a.inst, b.inst);
        assert_eq!(a.xi, b.xi);
        let mut r1 = rng_from_seed(3);
        let mut r2 = rng_from_seed(3);
        assert_eq!(sample_gaussian(16, &mut r1), sample_gaussian(16, &mut r2));
    }

    #[test]
    fn matched_pair_shares_data() {
        let mut sp = spec(NoiseKind::Gaussian);
        let one = gen_instance(&sp).unwrap();
        sp.q_for_sigma = Norm::L2;
        let two = gen_instance(&sp).unwrap();
        assert_eq!(one.inst.a, two.inst.a);
        assert_eq!(one.inst.b, two.inst.b);
        assert!((two.inst.sigma - 1e-2 * one.xi.norm()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_specs() {
        let mut sp = spec(NoiseKind::Gaussian);
        sp.s = 0;
        assert!(gen_instance(&sp).is_err());
        sp.s = 51;
        assert!(gen_instance(&sp).is_err());
        sp.s = 3;
        sp.delta = -1.0;
        assert!(gen_instance(&sp).is_err());
    }

    #[test]
    fn gaussian_moments() {
        let mut rng = rng_from_seed(11);
        let n = 1_000_000;
        let x = sample_gaussian(n, &mut rng);
        let mean = x.mean();
        let var = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
        assert!(mean.abs() < 4.0 / (n as f64).sqrt(), "{mean}");
        assert!((var - 1.0).abs() < 0.01, "{var}");
    }

    #[test]
    fn t2_matches_closed_form_cdf() {
        // F(t) = 1/2 + t / (2 sqrt(2 + t^2)), so the median of |xi| solves F(t) = 3/4
        let cdf = |t: f64| 0.5 + t / (2.0 * (2.0 + t * t).sqrt());
        let median_abs = (2.0f64 / 3.0).sqrt();
        assert!((cdf(median_abs) - 0.75).abs() < 1e-15);

        let mut rng = rng_from_seed(5);
        let n = 1_000_000;
        let mut abs: Vec<f64> = sample_t2(n, &mut rng).iter().map(|v| v.abs()).collect();
        abs.sort_by(f64::total_cmp);
        let emp = 0.5 * (abs[n / 2 - 1] + abs[n / 2]);
        assert!((emp / median_abs - 1.0).abs() < 0.02, "{emp}");
        // empirical CDF at a few quantiles, each within 4 standard errors
        for t in [0.25, 1.0, 3.0] {
            let frac = abs.partition_point(|v| *v <= t) as f64 / n as f64;
            let expect = 2.0 * cdf(t) - 1.0;
            assert!(
                (frac - expect).abs() < 4.0 * (0.25 / n as f64).sqrt(),
                "{t}: {frac} vs {expect}"
            );
        }
    }
}
