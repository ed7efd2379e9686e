//! Batch drivers behind the table and figure subcommands.
//!
//! Every run derives its instance seed from the batch seed, runs on a rayon pool and is
//! collected back in task order, so the CSV output depends only on the inputs. Wall-clock
//! columns are opt-in for the same reason.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use log::{info, warn};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::gen::{gen_instance, GenSpec, GeneratedInstance, NoiseKind};
use crate::instance::{validate_instance, Norm};
use crate::spel1::{solve_with, Method, SolveOptions, SolveReport, SolveStatus};
use crate::verify::kkt_property_report;

pub const THREADS_ENV: &str = "SPARSELP_THREADS";

pub const TABLE1_COLUMNS: &str =
    "noise,m,n,s,delta,p,runs,failed,nnz,rank,err1,err2,nnz_eq_rank,err1_zero";
pub const TABLE2_COLUMNS: &str = "noise,m,n,s,delta,seed,solver,status,nnz,feas,recerr,error";
pub const SPARSITY_COLUMNS: &str = "noise,m,n,s,delta,seed,p,status,nnz,rank,error";
pub const SUCCESS_COLUMNS: &str = "noise,m,n,s,delta,p,solver,trials,successes,failed,rate";
/// Appended to every header when timing is requested.
pub const TIME_COLUMN: &str = "time";

/// Problem sizes `(m, n, s)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Profile {
    Desk,
    Small,
    Paper,
}

impl Profile {
    pub fn dims(self) -> (usize, usize, usize) {
        match self {
            Profile::Desk => (100, 500, 10),
            Profile::Small => (200, 1000, 20),
            Profile::Paper => (500, 2500, 50),
        }
    }
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "desk" => Ok(Profile::Desk),
            "small" => Ok(Profile::Small),
            "paper" => Ok(Profile::Paper),
            other => Err(Error::param(format!("unknown profile {other:?}"))),
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Profile::Desk => "desk",
            Profile::Small => "small",
            Profile::Paper => "paper",
        })
    }
}

#[derive(Clone, Debug, Default)]
pub struct ExperimentOptions {
    pub cfg: SolverConfig,
    /// Worker count; falls back to `SPARSELP_THREADS`, then to rayon's default.
    pub threads: Option<usize>,
    /// Emit the `time` column.
    pub timing: bool,
}

pub fn threads_from_env() -> Option<usize> {
    let raw = std::env::var(THREADS_ENV).ok()?;
    match raw.trim().parse::<usize>() {
        Ok(n) if n > 0 => Some(n),
        _ => {
            warn!("ignoring {THREADS_ENV}={raw:?}");
            None
        }
    }
}

fn pool(opts: &ExperimentOptions) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(n) = opts.threads.or_else(threads_from_env) {
        b = b.num_threads(n);
    }
    b.build()
        .map_err(|e| Error::param(format!("thread pool: {e}")))
}

fn run_parallel<T: Sync, R: Send>(
    opts: &ExperimentOptions,
    tasks: &[T],
    f: impl Fn(&T) -> R + Sync + Send,
) -> Result<Vec<R>> {
    Ok(pool(opts)?.install(|| tasks.par_iter().map(f).collect()))
}

/// splitmix64 over the batch seed and the task coordinates.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    let mix = |mut z: u64| {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    };
    parts.iter().fold(mix(base), |acc, &p| mix(acc ^ p))
}

fn relative_error(x: &[f64], g: &GeneratedInstance) -> f64 {
    let num: f64 = x
        .iter()
        .zip(g.x_hat.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    num / g.x_hat.norm()
}

/// The same draw posed in the l2 norm: `sigma = delta ||xi||_2`.
fn l2_twin(g: &GeneratedInstance, delta: f64) -> Result<GeneratedInstance> {
    let mut twin = g.clone();
    twin.inst.sigma = delta * g.xi.norm();
    validate_instance(&twin.inst, Norm::L2)?;
    Ok(twin)
}

fn status_label(status: Option<SolveStatus>) -> &'static str {
    match status {
        Some(SolveStatus::Converged) => "converged",
        Some(SolveStatus::OuterCap) => "outer_cap",
        None => "error",
    }
}

fn header(columns: &str, timing: bool) -> Vec<String> {
    let mut h: Vec<String> = columns.split(',').map(str::to_owned).collect();
    if timing {
        h.push(TIME_COLUMN.to_owned());
    }
    h
}

fn write_csv<W: Write>(
    out: W,
    columns: &str,
    timing: bool,
    rows: impl Iterator<Item = (Vec<String>, f64)>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(columns, timing)).map_err(csv_err)?;
    for (mut rec, time) in rows {
        if timing {
            rec.push(time.to_string());
        }
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush().map_err(io_err)?;
    Ok(())
}

fn io_err(source: std::io::Error) -> Error {
    Error::Io {
        path: "<csv output>".into(),
        source,
    }
}

fn csv_err(e: csv::Error) -> Error {
    io_err(std::io::Error::other(e.to_string()))
}

fn mean(v: impl Iterator<Item = f64>) -> f64 {
    let (s, n) = v.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        s / n as f64
    }
}

// ---------------------------------------------------------------------------
// Table 1: structure of computed solutions

#[derive(Clone, Debug)]
pub struct Table1Spec {
    pub profile: Profile,
    pub delta: f64,
    pub noises: Vec<NoiseKind>,
    pub ps: Vec<f64>,
    /// Instance seeds, used directly.
    pub seeds: Vec<u64>,
}

impl Table1Spec {
    pub fn desk(seeds: usize) -> Self {
        Self {
            profile: Profile::Desk,
            delta: 1e-3,
            noises: vec![NoiseKind::Gaussian, NoiseKind::StudentT2],
            ps: vec![0.9, 0.7, 0.5, 0.3, 0.1],
            seeds: (0..seeds as u64).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Table1Run {
    pub noise: NoiseKind,
    pub p: f64,
    pub seed: u64,
    pub status: Option<SolveStatus>,
    pub nnz: usize,
    pub rank: usize,
    pub err1: f64,
    pub err2: f64,
    pub time: f64,
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct Table1Row {
    pub noise: NoiseKind,
    pub m: usize,
    pub n: usize,
    pub s: usize,
    pub delta: f64,
    pub p: f64,
    pub runs: usize,
    pub failed: usize,
    pub nnz: f64,
    pub rank: f64,
    pub err1: f64,
    pub err2: f64,
    /// Runs with `nnz = rank(A_J)`.
    pub nnz_eq_rank: usize,
    /// Runs with `err1 = 0`.
    pub err1_zero: usize,
    pub time: f64,
}

#[derive(Clone, Debug)]
pub struct Table1Output {
    pub runs: Vec<Table1Run>,
    pub rows: Vec<Table1Row>,
}

fn table1_run(
    spec: &Table1Spec,
    noise: NoiseKind,
    p: f64,
    seed: u64,
    cfg: &SolverConfig,
) -> Table1Run {
    let (m, n, s) = spec.profile.dims();
    let mut run = Table1Run {
        noise,
        p,
        seed,
        status: None,
        nnz: 0,
        rank: 0,
        err1: f64::NAN,
        err2: f64::NAN,
        time: 0.0,
        error: None,
    };
    let result = (|| -> Result<()> {
        let mut gs = GenSpec::new(m, n, s, spec.delta, noise, seed);
        gs.p = p;
        let g = gen_instance(&gs)?;
        let rep = solve_with(Method::Spel1, &g.inst, cfg, &SolveOptions::default())?;
        let kkt = kkt_property_report(&g.inst, &rep.x(), Norm::L1)?;
        run.status = Some(rep.status);
        run.nnz = kkt.nnz;
        run.rank = kkt.rank_aj;
        run.err1 = kkt.err1;
        run.err2 = kkt.err2;
        run.time = rep.wall_time;
        Ok(())
    })();
    if let Err(e) = result {
        warn!("table1 {noise} p={p} seed={seed}: {e}");
        run.error = Some(e.to_string());
    }
    run
}

pub fn run_table1(spec: &Table1Spec, opts: &ExperimentOptions) -> Result<Table1Output> {
    if spec.seeds.is_empty() || spec.ps.is_empty() || spec.noises.is_empty() {
        return Err(Error::param(
            "table1 needs at least one seed, p and noise family",
        ));
    }
    let tasks: Vec<(NoiseKind, f64, u64)> = spec
        .noises
        .iter()
        .flat_map(|&nk| {
            spec.ps
                .iter()
                .flat_map(move |&p| spec.seeds.iter().map(move |&s| (nk, p, s)))
        })
        .collect();
    info!("table1: {} runs on profile {}", tasks.len(), spec.profile);
    let runs = run_parallel(opts, &tasks, |&(nk, p, s)| {
        table1_run(spec, nk, p, s, &opts.cfg)
    })?;
    let (m, n, s) = spec.profile.dims();
    let rows = runs
        .chunks(spec.seeds.len())
        .map(|group| {
            let ok: Vec<&Table1Run> = group.iter().filter(|r| r.error.is_none()).collect();
            Table1Row {
                noise: group[0].noise,
                m,
                n,
                s,
                delta: spec.delta,
                p: group[0].p,
                runs: group.len(),
                failed: group.len() - ok.len(),
                nnz: mean(ok.iter().map(|r| r.nnz as f64)),
                rank: mean(ok.iter().map(|r| r.rank as f64)),
                err1: mean(ok.iter().map(|r| r.err1)),
                err2: mean(ok.iter().map(|r| r.err2)),
                nnz_eq_rank: ok.iter().filter(|r| r.nnz == r.rank).count(),
                err1_zero: ok.iter().filter(|r| r.err1 == 0.0).count(),
                time: mean(ok.iter().map(|r| r.time)),
            }
        })
        .collect();
    Ok(Table1Output { runs, rows })
}

pub fn write_table1_csv<W: Write>(rows: &[Table1Row], timing: bool, out: W) -> Result<()> {
    write_csv(
        out,
        TABLE1_COLUMNS,
        timing,
        rows.iter().map(|r| {
            (
                vec![
                    r.noise.to_string(),
                    r.m.to_string(),
                    r.n.to_string(),
                    r.s.to_string(),
                    r.delta.to_string(),
                    r.p.to_string(),
                    r.runs.to_string(),
                    r.failed.to_string(),
                    r.nnz.to_string(),
                    r.rank.to_string(),
                    r.err1.to_string(),
                    r.err2.to_string(),
                    r.nnz_eq_rank.to_string(),
                    r.err1_zero.to_string(),
                ],
                r.time,
            )
        }),
    )
}

// ---------------------------------------------------------------------------
// Table 2: l1 versus l2 constraint on matched instances

#[derive(Clone, Debug)]
pub struct Table2Spec {
    pub profile: Profile,
    pub delta: f64,
    pub p: f64,
    pub noises: Vec<NoiseKind>,
    pub seeds: Vec<u64>,
}

impl Table2Spec {
    pub fn desk(seeds: usize) -> Self {
        Self {
            profile: Profile::Desk,
            delta: 1e-3,
            p: 0.5,
            noises: vec![NoiseKind::Gaussian, NoiseKind::StudentT2],
            seeds: (0..seeds as u64).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Table2Row {
    pub noise: NoiseKind,
    pub m: usize,
    pub n: usize,
    pub s: usize,
    pub delta: f64,
    pub seed: u64,
    pub solver: Method,
    pub status: Option<SolveStatus>,
    pub nnz: usize,
    /// Constraint violation in the solver's own norm.
    pub feas: f64,
    pub recerr: f64,
    pub time: f64,
    pub error: Option<String>,
}

fn table2_pair(
    spec: &Table2Spec,
    noise: NoiseKind,
    seed: u64,
    cfg: &SolverConfig,
) -> [Table2Row; 2] {
    let (m, n, s) = spec.profile.dims();
    let blank = |solver| Table2Row {
        noise,
        m,
        n,
        s,
        delta: spec.delta,
        seed,
        solver,
        status: None,
        nnz: 0,
        feas: f64::NAN,
        recerr: f64::NAN,
        time: 0.0,
        error: None,
    };
    let mut rows = [blank(Method::Spel1), blank(Method::Spel2Style)];
    let mut gs = GenSpec::new(m, n, s, spec.delta, noise, seed);
    gs.p = spec.p;
    let g1 = match gen_instance(&gs) {
        Ok(g) => g,
        Err(e) => {
            warn!("table2 {noise} seed={seed}: {e}");
            for r in &mut rows {
                r.error = Some(e.to_string());
            }
            return rows;
        }
    };
    for row in &mut rows {
        let res = (|| -> Result<SolveReport> {
            let g = match row.solver {
                Method::Spel1 => g1.clone(),
                Method::Spel2Style => l2_twin(&g1, spec.delta)?,
            };
            solve_with(row.solver, &g.inst, cfg, &SolveOptions::default())
        })();
        match res {
            Ok(rep) => {
                row.status = Some(rep.status);
                row.nnz = rep.nnz();
                row.feas = rep.eta3;
                row.recerr = relative_error(&rep.x_star, &g1);
                row.time = rep.wall_time;
            }
            Err(e) => {
                warn!("table2 {noise} seed={seed} {}: {e}", row.solver.label());
                row.error = Some(e.to_string());
            }
        }
    }
    rows
}

pub fn run_table2(spec: &Table2Spec, opts: &ExperimentOptions) -> Result<Vec<Table2Row>> {
    if spec.seeds.is_empty() || spec.noises.is_empty() {
        return Err(Error::param(
            "table2 needs at least one seed and noise family",
        ));
    }
    let tasks: Vec<(NoiseKind, u64)> = spec
        .noises
        .iter()
        .flat_map(|&nk| spec.seeds.iter().map(move |&s| (nk, s)))
        .collect();
    info!(
        "table2: {} matched pairs on profile {}",
        tasks.len(),
        spec.profile
    );
    let pairs = run_parallel(opts, &tasks, |&(nk, s)| table2_pair(spec, nk, s, &opts.cfg))?;
    Ok(pairs.into_iter().flatten().collect())
}

pub fn write_table2_csv<W: Write>(rows: &[Table2Row], timing: bool, out: W) -> Result<()> {
    write_csv(
        out,
        TABLE2_COLUMNS,
        timing,
        rows.iter().map(|r| {
            (
                vec![
                    r.noise.to_string(),
                    r.m.to_string(),
                    r.n.to_string(),
                    r.s.to_string(),
                    r.delta.to_string(),
                    r.seed.to_string(),
                    r.solver.label().to_owned(),
                    status_label(r.status).to_owned(),
                    r.nnz.to_string(),
                    r.feas.to_string(),
                    r.recerr.to_string(),
                    r.error.clone().unwrap_or_default(),
                ],
                r.time,
            )
        }),
    )
}

// ---------------------------------------------------------------------------
// Sparsity of the computed solution as a function of p

#[derive(Clone, Debug)]
pub struct SparsitySpec {
    pub m: usize,
    pub n: usize,
    pub s: usize,
    pub delta: f64,
    pub seed: u64,
    pub noises: Vec<NoiseKind>,
    pub ps: Vec<f64>,
}

/// `0.05, 0.10, ..., 0.95`.
pub fn default_p_grid() -> Vec<f64> {
    (1..=19).map(|k| k as f64 / 20.0).collect()
}

impl SparsitySpec {
    pub fn desk(seed: u64) -> Self {
        let (m, n, s) = Profile::Desk.dims();
        Self {
            m,
            n,
            s,
            delta: 1e-3,
            seed,
            noises: vec![NoiseKind::Gaussian, NoiseKind::StudentT2],
            ps: default_p_grid(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SparsityRow {
    pub noise: NoiseKind,
    pub m: usize,
    pub n: usize,
    pub s: usize,
    pub delta: f64,
    pub seed: u64,
    pub p: f64,
    pub status: Option<SolveStatus>,
    pub nnz: usize,
    pub rank: usize,
    pub time: f64,
    pub error: Option<String>,
}

pub fn run_sparsity_vs_p(
    spec: &SparsitySpec,
    opts: &ExperimentOptions,
) -> Result<Vec<SparsityRow>> {
    if spec.ps.iter().any(|p| !(*p > 0.0 && *p < 1.0)) {
        return Err(Error::param("every p must lie in (0, 1)"));
    }
    // one instance per noise family, shared across the grid
    let instances: Vec<(NoiseKind, GeneratedInstance)> = spec
        .noises
        .iter()
        .map(|&nk| {
            gen_instance(&GenSpec::new(
                spec.m, spec.n, spec.s, spec.delta, nk, spec.seed,
            ))
            .map(|g| (nk, g))
        })
        .collect::<Result<_>>()?;
    let tasks: Vec<(usize, f64)> = (0..instances.len())
        .flat_map(|i| spec.ps.iter().map(move |&p| (i, p)))
        .collect();
    run_parallel(opts, &tasks, |&(i, p)| {
        let (noise, g) = &instances[i];
        let mut row = SparsityRow {
            noise: *noise,
            m: spec.m,
            n: spec.n,
            s: spec.s,
            delta: spec.delta,
            seed: g.seed_used,
            p,
            status: None,
            nnz: 0,
            rank: 0,
            time: 0.0,
            error: None,
        };
        let inst = g.inst.with_p(p);
        match solve_with(Method::Spel1, &inst, &opts.cfg, &SolveOptions::default())
            .and_then(|rep| kkt_property_report(&inst, &rep.x(), Norm::L1).map(|k| (rep, k)))
        {
            Ok((rep, kkt)) => {
                row.status = Some(rep.status);
                row.nnz = kkt.nnz;
                row.rank = kkt.rank_aj;
                row.time = rep.wall_time;
            }
            Err(e) => {
                warn!("sparsity {noise} p={p}: {e}");
                row.error = Some(e.to_string());
            }
        }
        row
    })
}

pub fn write_sparsity_csv<W: Write>(rows: &[SparsityRow], timing: bool, out: W) -> Result<()> {
    write_csv(
        out,
        SPARSITY_COLUMNS,
        timing,
        rows.iter().map(|r| {
            (
                vec![
                    r.noise.to_string(),
                    r.m.to_string(),
                    r.n.to_string(),
                    r.s.to_string(),
                    r.delta.to_string(),
                    r.seed.to_string(),
                    r.p.to_string(),
                    status_label(r.status).to_owned(),
                    r.nnz.to_string(),
                    r.rank.to_string(),
                    r.error.clone().unwrap_or_default(),
                ],
                r.time,
            )
        }),
    )
}

/// Number of adjacent pairs breaking monotonicity of `ys` along increasing `xs`.
///
/// With `nondecreasing = true`, a violation is a strict decrease; otherwise a strict increase.
pub fn trend_violations(points: &[(f64, f64)], nondecreasing: bool) -> usize {
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts.windows(2)
        .filter(|w| {
            if nondecreasing {
                w[1].1 < w[0].1
            } else {
                w[1].1 > w[0].1
            }
        })
        .count()
}

// ---------------------------------------------------------------------------
// Frequency of successful recovery

#[derive(Clone, Debug)]
pub struct SuccessSpec {
    pub m: usize,
    pub n: usize,
    pub s_values: Vec<usize>,
    pub delta: f64,
    pub ps: Vec<f64>,
    pub noises: Vec<NoiseKind>,
    pub solvers: Vec<Method>,
    pub trials: usize,
    pub threshold: f64,
    pub seed: u64,
}

impl SuccessSpec {
    pub fn desk(seed: u64) -> Self {
        Self {
            m: 64,
            n: 256,
            s_values: (10..=35).step_by(5).collect(),
            delta: 1e-3,
            ps: vec![0.5],
            noises: vec![NoiseKind::Gaussian, NoiseKind::StudentT2],
            solvers: vec![Method::Spel1, Method::Spel2Style],
            trials: 50,
            threshold: 5e-3,
            seed,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuccessRow {
    pub noise: NoiseKind,
    pub m: usize,
    pub n: usize,
    pub s: usize,
    pub delta: f64,
    pub p: f64,
    pub solver: Method,
    pub trials: usize,
    pub successes: usize,
    /// Trials whose generation or solve returned an error; counted as failures.
    pub failed: usize,
    pub rate: f64,
    pub time: f64,
}

/// Per trial: `(recerr, time)` for each solver, or an error.
fn success_trial(
    spec: &SuccessSpec,
    noise: NoiseKind,
    s: usize,
    trial: usize,
    cfg: &SolverConfig,
) -> Vec<Vec<Result<(f64, f64)>>> {
    let seed = derive_seed(spec.seed, &[noise as u64, s as u64, trial as u64]);
    let g1 = gen_instance(&GenSpec::new(spec.m, spec.n, s, spec.delta, noise, seed));
    let g2 = g1
        .as_ref()
        .map_err(|e| Error::param(e.to_string()))
        .and_then(|g| l2_twin(g, spec.delta));
    spec.ps
        .iter()
        .map(|&p| {
            spec.solvers
                .iter()
                .map(|&method| {
                    let g = match method {
                        Method::Spel1 => g1.as_ref().map_err(|e| Error::param(e.to_string()))?,
                        Method::Spel2Style => {
                            g2.as_ref().map_err(|e| Error::param(e.to_string()))?
                        }
                    };
                    let rep = solve_with(method, &g.inst.with_p(p), cfg, &SolveOptions::default())?;
                    Ok((relative_error(&rep.x_star, g), rep.wall_time))
                })
                .collect()
        })
        .collect()
}

pub fn run_success_curve(spec: &SuccessSpec, opts: &ExperimentOptions) -> Result<Vec<SuccessRow>> {
    if spec.trials == 0 || spec.s_values.is_empty() || spec.ps.is_empty() || spec.solvers.is_empty()
    {
        return Err(Error::param(
            "success curve needs trials, s values, p values and solvers",
        ));
    }
    if let Some(&s) = spec.s_values.iter().find(|&&s| s == 0 || s > spec.n) {
        return Err(Error::param(format!(
            "sparsity s = {s} outside [1, n = {}]",
            spec.n
        )));
    }
    let tasks: Vec<(NoiseKind, usize, usize)> = spec
        .noises
        .iter()
        .flat_map(|&nk| {
            spec.s_values
                .iter()
                .flat_map(move |&s| (0..spec.trials).map(move |t| (nk, s, t)))
        })
        .collect();
    info!("success curve: {} trials", tasks.len());
    let results = run_parallel(opts, &tasks, |&(nk, s, t)| {
        success_trial(spec, nk, s, t, &opts.cfg)
    })?;

    let mut rows = Vec::new();
    for (block, group) in results.chunks(spec.trials).enumerate() {
        let (noise, s, _) = tasks[block * spec.trials];
        for (pi, &p) in spec.ps.iter().enumerate() {
            for (si, &solver) in spec.solvers.iter().enumerate() {
                let outcomes: Vec<&Result<(f64, f64)>> = group.iter().map(|t| &t[pi][si]).collect();
                let successes = outcomes
                    .iter()
                    .filter(|o| matches!(o, Ok((r, _)) if *r < spec.threshold))
                    .count();
                let failed = outcomes.iter().filter(|o| o.is_err()).count();
                rows.push(SuccessRow {
                    noise,
                    m: spec.m,
                    n: spec.n,
                    s,
                    delta: spec.delta,
                    p,
                    solver,
                    trials: spec.trials,
                    successes,
                    failed,
                    rate: successes as f64 / spec.trials as f64,
                    time: mean(outcomes.iter().filter_map(|o| o.as_ref().ok().map(|v| v.1))),
                });
            }
        }
    }
    // group curves together: noise, p, solver, then s
    rows.sort_by(|a, b| {
        (a.noise as u8, a.solver as u8)
            .cmp(&(b.noise as u8, b.solver as u8))
            .then(a.p.total_cmp(&b.p))
            .then(a.s.cmp(&b.s))
    });
    Ok(rows)
}

pub fn write_success_csv<W: Write>(rows: &[SuccessRow], timing: bool, out: W) -> Result<()> {
    write_csv(
        out,
        SUCCESS_COLUMNS,
        timing,
        rows.iter().map(|r| {
            (
                vec![
                    r.noise.to_string(),
                    r.m.to_string(),
                    r.n.to_string(),
                    r.s.to_string(),
                    r.delta.to_string(),
                    r.p.to_string(),
                    r.solver.label().to_owned(),
                    r.trials.to_string(),
                    r.successes.to_string(),
                    r.failed.to_string(),
                    r.rate.to_string(),
                ],
                r.time,
            )
        }),
    )
}
