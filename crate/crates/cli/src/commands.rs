use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{bail, Context, Result};
use nalgebra::DVector;
use serde::Serialize;
use serde_json::{json, Map, Value};
use sparselp::experiments::{
    self, ExperimentOptions, SparsitySpec, SuccessSpec, Table1Spec, Table2Spec,
};
use sparselp::gen::{gen_instance, GenSpec};
use sparselp::instance::{read_instance, write_instance, Norm};
use sparselp::npg::write_npg_trace;
use sparselp::oracle::{
    check_inclusion, estimate_p_star, solve_exact_l0, solve_exact_lp_quasinorm,
};
use sparselp::smoothing::sample_smoothing_grid;
use sparselp::spel1::{
    solve_with, write_outer_trace, Method, SolveOptions, SolveReport, SolveStatus,
};
use sparselp::verify::theorem21_suite;
use sparselp::SolverConfig;

use crate::{Cli, Cmd, EXIT_CAP, EXIT_RUNTIME, SMOOTHING_COLUMNS};

pub fn run(cli: &Cli) -> Result<u8> {
    match &cli.cmd {
        Cmd::Gen(a) => gen(cli, a),
        Cmd::Solve(a) => solve(cli, a),
        Cmd::Verify(a) => verify(cli, a),
        Cmd::Oracle(a) => oracle(cli, a),
        Cmd::Table1(a) => table1(cli, a),
        Cmd::Table2(a) => table2(cli, a),
        Cmd::SparsityVsP(a) => sparsity(cli, a),
        Cmd::SuccessCurve(a) => success(cli, a),
        Cmd::PlotSmoothing(a) => smoothing(cli, a),
    }
}

fn emit(cli: &Cli, bytes: &[u8]) -> Result<()> {
    match &cli.out {
        Some(path) => fs::write(path, bytes).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()?;
            Ok(())
        }
    }
}

fn emit_json<T: Serialize + ?Sized>(cli: &Cli, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit(cli, text.as_bytes())
}

fn read_json(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// A JSON array of numbers, or an object carrying one under `x_star`.
fn read_vector(path: &Path) -> Result<DVector<f64>> {
    let v = read_json(path)?;
    let arr = match &v {
        Value::Array(_) => &v,
        Value::Object(map) => map
            .get("x_star")
            .with_context(|| format!("{}: object without an x_star field", path.display()))?,
        _ => bail!("{}: expected a JSON array", path.display()),
    };
    let xs: Vec<f64> = serde_json::from_value(arr.clone())
        .with_context(|| format!("{}: not a numeric array", path.display()))?;
    Ok(DVector::from_vec(xs))
}

fn gen(cli: &Cli, a: &crate::GenArgs) -> Result<u8> {
    let mut spec = GenSpec::new(a.m, a.n, a.s, a.delta, a.noise, cli.seed.unwrap_or(0));
    spec.q_for_sigma = a.q;
    spec.p = a.p;
    let g = gen_instance(&spec)?;
    match &cli.out {
        Some(path) => write_instance(&g.inst, path)?,
        None => emit(
            cli,
            format!("{}\n", sparselp::instance::instance_to_json(&g.inst)).as_bytes(),
        )?,
    }
    if let Some(path) = &a.truth {
        let truth = json!({
            "seed_used": g.seed_used,
            "support": g.support,
            "x_hat": g.x_hat.as_slice(),
            "xi": g.xi.as_slice(),
        });
        fs::write(path, serde_json::to_string_pretty(&truth)?)
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(0)
}

#[derive(Serialize)]
struct SolveSummary<'a> {
    method: &'static str,
    p: f64,
    status: SolveStatus,
    nnz: usize,
    support: &'a sparselp::SupportSet,
    objective: f64,
    l1_residual: f64,
    l2_residual: f64,
    sigma: f64,
    eta1: f64,
    eta2: f64,
    eta3: f64,
    outer_iters: usize,
    inner_iters_total: usize,
    wall_time: f64,
    x_star: &'a [f64],
}

fn summary(rep: &SolveReport) -> SolveSummary<'_> {
    SolveSummary {
        method: rep.method.label(),
        p: rep.p,
        status: rep.status,
        nnz: rep.nnz(),
        support: &rep.support,
        objective: rep.objective,
        l1_residual: rep.l1_residual,
        l2_residual: rep.l2_residual,
        sigma: rep.sigma,
        eta1: rep.eta1,
        eta2: rep.eta2,
        eta3: rep.eta3,
        outer_iters: rep.outer_iters,
        inner_iters_total: rep.inner_iters_total,
        wall_time: rep.wall_time,
        x_star: &rep.x_star,
    }
}

fn solver_config(path: Option<&Path>, outer_cap: Option<usize>) -> Result<SolverConfig> {
    let mut cfg = match path {
        Some(p) => {
            // merge over the defaults so partial files work
            let mut base = serde_json::to_value(SolverConfig::default())?;
            merge(&mut base, read_json(p)?);
            serde_json::from_value(base)
                .with_context(|| format!("{}: invalid solver config", p.display()))?
        }
        None => SolverConfig::default(),
    };
    if let Some(cap) = outer_cap {
        cfg.outer_cap = cap;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                merge(b.entry(k).or_insert(Value::Null), v);
            }
        }
        (b, p) => *b = p,
    }
}

fn solve(cli: &Cli, a: &crate::SolveArgs) -> Result<u8> {
    let mut inst = read_instance(&a.instance)?;
    if let Some(p) = a.p {
        inst.p = p;
    }
    let method = match a.q {
        Norm::L2 => Method::Spel2Style,
        _ => Method::Spel1,
    };
    let cfg = solver_config(a.config.as_deref(), a.outer_cap)?;
    let opts = SolveOptions {
        seed_x: a.x0.as_deref().map(read_vector).transpose()?,
        record_inner: a.inner_trace.is_some(),
    };
    let rep = solve_with(method, &inst, &cfg, &opts)?;
    if let Some(path) = &a.trace {
        let f = fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
        write_outer_trace(&rep.trace, f)?;
    }
    if let Some(path) = &a.inner_trace {
        let f = fs::File::create(path).with_context(|| format!("writing {}", path.display()))?;
        let records: Vec<_> = rep.inner_trace.iter().map(|(_, r)| *r).collect();
        write_npg_trace(&records, f)?;
    }
    let csv_out = !cli.json
        && cli
            .out
            .as_ref()
            .is_some_and(|p| p.extension().is_some_and(|e| e == "csv"));
    if csv_out {
        let mut text = String::from("index,value\n");
        for (i, v) in rep.x_star.iter().enumerate() {
            text.push_str(&format!("{i},{v}\n"));
        }
        emit(cli, text.as_bytes())?;
    } else {
        emit_json(cli, &summary(&rep))?;
    }
    Ok(match rep.status {
        SolveStatus::Converged => 0,
        SolveStatus::OuterCap => EXIT_CAP,
    })
}

fn verify(cli: &Cli, a: &crate::VerifyArgs) -> Result<u8> {
    let inst = read_instance(&a.instance)?;
    let x = read_vector(&a.x)?;
    let p = a.p.unwrap_or(inst.p);
    let suite = theorem21_suite(&inst, &x, p, a.q, a.tol)?;
    emit_json(
        cli,
        &json!({
            "all_passed": suite.all_passed(),
            "checks": suite.checks,
            "report": suite.report,
        }),
    )?;
    Ok(if suite.all_passed() { 0 } else { EXIT_RUNTIME })
}

fn oracle(cli: &Cli, a: &crate::OracleArgs) -> Result<u8> {
    let inst = read_instance(&a.instance)?;
    let mut out = Map::new();
    let mut ps = a.p.clone();
    if ps.is_empty() && !a.check_inclusion && !a.p_star {
        ps.push(inst.p);
    }
    let mut solutions = Vec::new();
    for &p in &ps {
        let sol = if p == 0.0 {
            solve_exact_l0(&inst)?
        } else {
            solve_exact_lp_quasinorm(&inst, p)?
        };
        solutions.push(serde_json::to_value(sol)?);
    }
    if let [only] = solutions.as_slice() {
        for key in ["optimal_value", "minimizers", "supports"] {
            out.insert(key.into(), only[key].clone());
        }
    }
    if !solutions.is_empty() {
        out.insert("solutions".into(), Value::Array(solutions));
    }
    let needs_p_star = a.p_star || (a.check_inclusion && a.p.is_empty());
    let p_star = if needs_p_star {
        Some(estimate_p_star(&inst)?)
    } else {
        None
    };
    if let Some(est) = &p_star {
        if let Value::Object(m) = serde_json::to_value(est)? {
            out.extend(m);
        }
    }
    let mut code = 0;
    if a.check_inclusion {
        let l0 = solve_exact_l0(&inst)?;
        let targets: Vec<f64> = if a.p.is_empty() {
            let ps = p_star.expect("computed above").p_star;
            vec![ps / 2.0, 0.9 * ps]
        } else {
            a.p.iter().copied().filter(|p| *p > 0.0).collect()
        };
        let mut checks = Vec::new();
        for p in targets {
            let c = check_inclusion(&inst, &l0, p)?;
            if !c.holds() {
                code = EXIT_RUNTIME;
            }
            checks.push(json!({
                "p": c.p,
                "holds": c.holds(),
                "sparsest_nnz": c.sparsest_nnz,
                "minimizers": c.minimizers,
                "violations": c.violations,
            }));
        }
        out.insert("inclusion".into(), Value::Array(checks));
    }
    emit_json(cli, &out)?;
    Ok(code)
}

fn experiment_options(timing: bool) -> ExperimentOptions {
    ExperimentOptions {
        timing,
        ..ExperimentOptions::default()
    }
}

fn seeds(cli: &Cli, count: usize) -> Vec<u64> {
    let base = cli.seed.unwrap_or(0);
    (0..count as u64).map(|k| base.wrapping_add(k)).collect()
}

fn table1(cli: &Cli, a: &crate::Table1Args) -> Result<u8> {
    let spec = Table1Spec {
        profile: a.profile,
        delta: a.delta,
        noises: a.noise.clone(),
        ps: a.p.clone(),
        seeds: seeds(cli, a.seeds),
    };
    let out = experiments::run_table1(&spec, &experiment_options(a.timing))?;
    if cli.json {
        emit_json(cli, &json!({ "rows": out.rows, "runs": out.runs }))?;
    } else {
        let mut buf = Vec::new();
        experiments::write_table1_csv(&out.rows, a.timing, &mut buf)?;
        emit(cli, &buf)?;
    }
    Ok(0)
}

fn table2(cli: &Cli, a: &crate::Table2Args) -> Result<u8> {
    let spec = Table2Spec {
        profile: a.profile,
        delta: a.delta,
        p: a.p,
        noises: a.noise.clone(),
        seeds: seeds(cli, a.seeds),
    };
    let rows = experiments::run_table2(&spec, &experiment_options(a.timing))?;
    if cli.json {
        emit_json(cli, &rows)?;
    } else {
        let mut buf = Vec::new();
        experiments::write_table2_csv(&rows, a.timing, &mut buf)?;
        emit(cli, &buf)?;
    }
    Ok(0)
}

fn sparsity(cli: &Cli, a: &crate::SparsityArgs) -> Result<u8> {
    let mut spec = SparsitySpec::desk(cli.seed.unwrap_or(0));
    let (m, n, s) = a.profile.dims();
    spec.m = a.m.unwrap_or(m);
    spec.n = a.n.unwrap_or(n);
    spec.s = a.s.unwrap_or(s);
    spec.delta = a.delta;
    spec.noises = a.noise.clone();
    if !a.p.is_empty() {
        spec.ps = a.p.clone();
    }
    let rows = experiments::run_sparsity_vs_p(&spec, &experiment_options(a.timing))?;
    if cli.json {
        emit_json(cli, &rows)?;
    } else {
        let mut buf = Vec::new();
        experiments::write_sparsity_csv(&rows, a.timing, &mut buf)?;
        emit(cli, &buf)?;
    }
    Ok(0)
}

fn success(cli: &Cli, a: &crate::SuccessArgs) -> Result<u8> {
    if a.s_step == 0 || a.s_min > a.s_max {
        bail!(
            "empty sparsity range {}..={} step {}",
            a.s_min,
            a.s_max,
            a.s_step
        );
    }
    let spec = SuccessSpec {
        m: a.m,
        n: a.n,
        s_values: (a.s_min..=a.s_max).step_by(a.s_step).collect(),
        delta: a.delta,
        ps: a.p.clone(),
        noises: a.noise.clone(),
        solvers: a.solver.clone(),
        trials: a.trials,
        threshold: a.threshold,
        seed: cli.seed.unwrap_or(0),
    };
    let rows = experiments::run_success_curve(&spec, &experiment_options(a.timing))?;
    if cli.json {
        emit_json(cli, &rows)?;
    } else {
        let mut buf = Vec::new();
        experiments::write_success_csv(&rows, a.timing, &mut buf)?;
        emit(cli, &buf)?;
    }
    Ok(0)
}

fn smoothing(cli: &Cli, a: &crate::SmoothingArgs) -> Result<u8> {
    let samples = sample_smoothing_grid(&a.mu, &a.nu, a.lo, a.hi, a.points)?;
    if cli.json {
        emit_json(cli, &samples)?;
    } else {
        let mut text = format!("{SMOOTHING_COLUMNS}\n");
        for s in &samples {
            text.push_str(&format!(
                "{},{},{},{},{}\n",
                s.function, s.width, s.t, s.value, s.derivative
            ));
        }
        emit(cli, text.as_bytes())?;
    }
    Ok(0)
}
