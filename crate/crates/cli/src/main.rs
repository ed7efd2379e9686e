mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgAction, Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use sparselp::experiments::{
    SPARSITY_COLUMNS, SUCCESS_COLUMNS, TABLE1_COLUMNS, TABLE2_COLUMNS, TIME_COLUMN,
};
use sparselp::gen::NoiseKind;
use sparselp::instance::Norm;
use sparselp::spel1::Method;

pub const EXIT_USAGE: u8 = 64;
pub const EXIT_RUNTIME: u8 = 1;
pub const EXIT_CAP: u8 = 2;

pub const SMOOTHING_COLUMNS: &str = "function,width,t,value,derivative";

/// Sparse recovery with an l1 residual constraint and an lp quasi-norm objective.
#[derive(Parser, Debug)]
#[command(name = "sparselp", version)]
pub struct Cli {
    /// Random seed (base seed for batch commands).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Emit JSON instead of CSV.
    #[arg(long, global = true)]
    pub json: bool,
    /// More log output on stderr (repeatable).
    #[arg(short, long, global = true, action = ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Subcommand, Debug)]
pub enum Cmd {
    /// Draw a random instance and write it as JSON.
    Gen(GenArgs),
    /// Run the smoothing penalty solver on an instance.
    Solve(SolveArgs),
    /// Check the structural properties of a candidate solution.
    Verify(VerifyArgs),
    /// Exact global minimizers of a tiny instance by vertex enumeration.
    Oracle(OracleArgs),
    /// Structure of computed solutions over seeds, noise families and p.
    Table1(Table1Args),
    /// l1 versus l2 constrained recovery on matched instances.
    Table2(Table2Args),
    /// Number of nonzeros of the computed solution along a grid of p.
    SparsityVsP(SparsityArgs),
    /// Frequency of successful recovery as the sparsity grows.
    SuccessCurve(SuccessArgs),
    /// Sample the two smoothing functions on a grid.
    PlotSmoothing(SmoothingArgs),
}

pub fn parse_q(s: &str) -> Result<Norm, String> {
    match s {
        "1" => Ok(Norm::L1),
        "2" => Ok(Norm::L2),
        other => Err(format!("q must be 1 or 2, got {other:?}")),
    }
}

pub fn parse_method(s: &str) -> Result<Method, String> {
    match s {
        "spel1" => Ok(Method::Spel1),
        "spel2-style" | "spel2" => Ok(Method::Spel2Style),
        other => Err(format!("unknown solver {other:?} (spel1, spel2-style)")),
    }
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub s: usize,
    #[arg(long, default_value_t = 1e-3)]
    pub delta: f64,
    #[arg(long, default_value = "gauss")]
    pub noise: NoiseKind,
    /// Norm of the noise used for sigma.
    #[arg(long, default_value = "1", value_parser = parse_q)]
    pub q: Norm,
    /// Exponent stored in the instance.
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Also write the planted signal and noise as JSON.
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Overrides the exponent stored in the instance.
    #[arg(long)]
    pub p: Option<f64>,
    /// 1 for the l1 constraint, 2 for the l2 baseline.
    #[arg(long, default_value = "1", value_parser = parse_q)]
    pub q: Norm,
    /// Write the outer-iteration trace as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Also write the inner-iteration trace as CSV.
    #[arg(long)]
    pub inner_trace: Option<PathBuf>,
    /// Solver settings as JSON; missing fields keep their defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub outer_cap: Option<usize>,
    /// Feasible starting point (JSON array).
    #[arg(long)]
    pub x0: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// JSON array, or a solve report with an `x_star` field.
    #[arg(long)]
    pub x: PathBuf,
    /// Exponent; 0 checks boundary scaling instead of an active constraint.
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long, default_value = "1", value_parser = parse_q)]
    pub q: Norm,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

#[derive(Args, Debug)]
pub struct OracleArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Exponent to solve for (repeatable; 0 gives the sparsest feasible points).
    #[arg(long = "p", value_delimiter = ',')]
    pub p: Vec<f64>,
    /// Report the threshold exponent and its ingredients.
    #[arg(long)]
    pub p_star: bool,
    /// Check that every minimizer is a sparsest feasible point; uses p*/2 and 0.9 p*
    /// unless --p is given. Exit code 1 on a violation.
    #[arg(long)]
    pub check_inclusion: bool,
}

#[derive(Args, Debug)]
pub struct Table1Args {
    /// desk (100,500,10), small (200,1000,20) or paper (500,2500,50).
    #[arg(long, default_value = "desk")]
    pub profile: sparselp::experiments::Profile,
    /// Number of seeds, starting at --seed.
    #[arg(long, default_value_t = 10)]
    pub seeds: usize,
    #[arg(long, value_delimiter = ',', default_values = ["gauss", "t2"])]
    pub noise: Vec<NoiseKind>,
    #[arg(long = "p", value_delimiter = ',', default_values_t = [0.9, 0.7, 0.5, 0.3, 0.1])]
    pub p: Vec<f64>,
    #[arg(long, default_value_t = 1e-3)]
    pub delta: f64,
    /// Add the wall-clock column (makes the output machine dependent).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Args, Debug)]
pub struct Table2Args {
    #[arg(long, default_value = "desk")]
    pub profile: sparselp::experiments::Profile,
    #[arg(long, default_value_t = 10)]
    pub seeds: usize,
    #[arg(long, value_delimiter = ',', default_values = ["gauss", "t2"])]
    pub noise: Vec<NoiseKind>,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub delta: f64,
    #[arg(long)]
    pub timing: bool,
}

#[derive(Args, Debug)]
pub struct SparsityArgs {
    /// Supplies m, n and s unless given explicitly.
    #[arg(long, default_value = "desk")]
    pub profile: sparselp::experiments::Profile,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub s: Option<usize>,
    #[arg(long, default_value_t = 1e-3)]
    pub delta: f64,
    #[arg(long, value_delimiter = ',', default_values = ["gauss", "t2"])]
    pub noise: Vec<NoiseKind>,
    /// Grid of exponents; 0.05, 0.10, ..., 0.95 when omitted.
    #[arg(long = "p", value_delimiter = ',')]
    pub p: Vec<f64>,
    #[arg(long)]
    pub timing: bool,
}

#[derive(Args, Debug)]
pub struct SuccessArgs {
    #[arg(long, default_value_t = 64)]
    pub m: usize,
    #[arg(long, default_value_t = 256)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub s_min: usize,
    #[arg(long, default_value_t = 35)]
    pub s_max: usize,
    #[arg(long, default_value_t = 5)]
    pub s_step: usize,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    /// Success means relative recovery error below this.
    #[arg(long, default_value_t = 5e-3)]
    pub threshold: f64,
    #[arg(long, default_value_t = 1e-3)]
    pub delta: f64,
    #[arg(long = "p", value_delimiter = ',', default_values_t = [0.5])]
    pub p: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values = ["gauss", "t2"])]
    pub noise: Vec<NoiseKind>,
    #[arg(long, value_delimiter = ',', default_values = ["spel1", "spel2-style"], value_parser = parse_method)]
    pub solver: Vec<Method>,
    #[arg(long)]
    pub timing: bool,
}

#[derive(Args, Debug)]
pub struct SmoothingArgs {
    /// Widths of the smoothed plus function.
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 2.0])]
    pub mu: Vec<f64>,
    /// Widths of the smoothed absolute value.
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 2.0])]
    pub nu: Vec<f64>,
    #[arg(long, default_value_t = -2.0, allow_hyphen_values = true)]
    pub lo: f64,
    #[arg(long, default_value_t = 2.0, allow_hyphen_values = true)]
    pub hi: f64,
    #[arg(long, default_value_t = 401)]
    pub points: usize,
}

fn columns_help(columns: &str) -> String {
    format!("CSV columns: {columns}\nWith --timing a trailing `{TIME_COLUMN}` column (seconds) is appended.")
}

pub fn command() -> clap::Command {
    Cli::command()
        .mut_subcommand("table1", |c| c.after_help(columns_help(TABLE1_COLUMNS)))
        .mut_subcommand("table2", |c| c.after_help(columns_help(TABLE2_COLUMNS)))
        .mut_subcommand("sparsity-vs-p", |c| {
            c.after_help(columns_help(SPARSITY_COLUMNS))
        })
        .mut_subcommand("success-curve", |c| {
            c.after_help(columns_help(SUCCESS_COLUMNS))
        })
        .mut_subcommand("plot-smoothing", |c| {
            c.after_help(format!("CSV columns: {SMOOTHING_COLUMNS}"))
        })
}

fn main() -> ExitCode {
    let parsed = command()
        .try_get_matches()
        .and_then(|m| Cli::from_arg_matches(&m));
    let cli = match parsed {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}
