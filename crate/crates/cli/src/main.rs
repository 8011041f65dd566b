//! `ere-stability`: point analysis, figure reproduction, small-mass limit
//! reports and configuration reduction from the command line.

mod config;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use ere_stability::curves::{default_e_grid, figure_one, figure_two, region_classify, FigureData, ROOT_WIDTH};
use ere_stability::numerics::C64;
use ere_stability::reduction::{cc_residual, reduce};
use ere_stability::report::{analyze_point, curves_csv, figure_svg, region_csv, round15, SCHEMA_VERSION};
use ere_stability::smallmass::{eps_ladder, Branch, DEFAULT_LADDER};
use ere_stability::systems::{EssentialSystem, Family, BETA_MAX};
use ere_stability::Error;
use serde_json::{json, Value};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_UNSTABILIZED: u8 = 3;
const THREADS_VAR: &str = "ERE_STABILITY_THREADS";

#[derive(Parser, Debug)]
#[command(name = "ere-stability", version, about = "Linear stability of elliptic relative equilibria with two small masses")]
struct Cli {
    /// key = value file mirroring the flags; flags on the command line win.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Monodromy, normal form, verdict and ω-indices at one parameter point.
    #[command(args_override_self = true)]
    Analyze(AnalyzeArgs),
    /// Traces the curves of figure 1 (non-convex) or figure 2 (convex).
    #[command(args_override_self = true)]
    Figure(FigureArgs),
    /// Finite-ε essential parameters of the small-mass family against their limits.
    #[command(name = "cc-limit", args_override_self = true)]
    CcLimit(CcLimitArgs),
    /// Essential parameters of a four-body central configuration.
    #[command(args_override_self = true)]
    Reduce(ReduceArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum CaseArg {
    Nonconvex,
    Convex,
    Lagrange,
    Custom,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Csv,
    Json,
    Svg,
}

#[derive(clap::Args, Debug)]
struct AnalyzeArgs {
    #[arg(long, value_enum)]
    case: CaseArg,
    /// Mass parameter β ∈ [0, 27/4]; for the non-convex case β̃ = √(9−β).
    #[arg(long, allow_negative_numbers = true)]
    beta: Option<f64>,
    /// Non-convex parameter β̃ directly (replaces --beta).
    #[arg(long, allow_negative_numbers = true)]
    beta_tilde: Option<f64>,
    /// Eccentricity e ∈ [0, 1).
    #[arg(long, allow_negative_numbers = true)]
    ecc: f64,
    /// Extra ω on the unit circle, as `re,im` or a real ±1.
    #[arg(long, allow_negative_numbers = true)]
    omega: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    lambda3: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    lambda4: Option<f64>,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
struct FigureArgs {
    /// 1 for the non-convex figure, 2 for the convex one.
    #[arg(value_parser = clap::value_parser!(u8).range(1..=2))]
    figure: u8,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Additional SVG overlay of the traced curves.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Region map CSV over a 41-point parameter grid at the traced eccentricities.
    #[arg(long)]
    regions: Option<PathBuf>,
    /// Eccentricities as `a,b,c` or `start:step:end`.
    #[arg(long)]
    e_grid: Option<String>,
    /// Scan each convex hyperbolicity window to confirm it is an interval.
    #[arg(long)]
    paranoid: bool,
}

#[derive(clap::Args, Debug)]
struct CcLimitArgs {
    #[arg(long)]
    m: f64,
    #[arg(long)]
    tau: f64,
    #[arg(long)]
    branch: String,
    /// Comma-separated ε values.
    #[arg(long)]
    eps_ladder: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(clap::Args, Debug)]
struct ReduceArgs {
    /// Four masses `m1,m2,m3,m4`.
    #[arg(long)]
    masses: String,
    /// Four positions `x1,y1;x2,y2;x3,y3;x4,y4`.
    #[arg(long, allow_hyphen_values = true)]
    positions: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Failure(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::OutOfRange(_)
            | Error::CoincidentBodies(..)
            | Error::Collinear
            | Error::DegenerateConfiguration(_) => CliError::Usage(e.to_string()),
            other => CliError::Failure(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn usage<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Usage(msg.into()))
}

/// Rounds every non-integer number of a JSON tree to 15 significant digits.
fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round15(n.as_f64().unwrap_or(f64::NAN));
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

fn to_json<T: serde::Serialize>(x: &T) -> CliResult<String> {
    let v = serde_json::to_value(x).map_err(|e| CliError::Failure(e.to_string()))?;
    serde_json::to_string_pretty(&round_json(v))
        .map(|s| s + "\n")
        .map_err(|e| CliError::Failure(e.to_string()))
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Failure(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn parse_list(s: &str, what: &str) -> CliResult<Vec<f64>> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("bad number '{x}' in {what}"))))
        .collect()
}

fn parse_e_grid(s: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let grid = if parts.len() == 3 {
        let v = parse_list(&parts.join(","), "e-grid")?;
        let (start, step, end) = (v[0], v[1], v[2]);
        if !(step > 0.0) || end < start {
            return usage("e-grid range needs step > 0 and end ≥ start");
        }
        let n = ((end - start) / step + 1e-9).floor() as usize;
        (0..=n).map(|k| round15(start + step * k as f64)).collect()
    } else {
        parse_list(s, "e-grid")?
    };
    if grid.is_empty() || grid.iter().any(|e| !(0.0..1.0).contains(e)) {
        return usage("eccentricities must lie in [0, 1)");
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return usage("e-grid must be strictly increasing");
    }
    Ok(grid)
}

fn parse_omega(s: &str) -> CliResult<C64> {
    let v = parse_list(s, "omega")?;
    let w = match v.as_slice() {
        [re] => C64::new(*re, 0.0),
        [re, im] => C64::new(*re, *im),
        _ => return usage("omega must be `re,im` or a real number"),
    };
    if (w.norm() - 1.0).abs() > 1e-9 {
        return usage(format!("omega {w} is not on the unit circle"));
    }
    Ok(w)
}

fn analyze(a: &AnalyzeArgs) -> CliResult<bool> {
    let sys = match a.case {
        CaseArg::Nonconvex => match (a.beta, a.beta_tilde) {
            (Some(_), Some(_)) => return usage("give either --beta or --beta-tilde"),
            (Some(b), None) => EssentialSystem::nonconvex(b, a.ecc)?,
            (None, Some(bt)) => EssentialSystem::nonconvex_tilde(bt, a.ecc)?,
            (None, None) => return usage("the non-convex case needs --beta or --beta-tilde"),
        },
        CaseArg::Convex | CaseArg::Lagrange => {
            let b = a.beta.ok_or_else(|| CliError::Usage("--beta is required".into()))?;
            if a.case == CaseArg::Convex {
                EssentialSystem::convex(b, a.ecc)?
            } else {
                EssentialSystem::lagrange(b, a.ecc)?
            }
        }
        CaseArg::Custom => match (a.lambda3, a.lambda4) {
            (Some(l3), Some(l4)) => EssentialSystem::custom(l3, l4, a.ecc)?,
            _ => return usage("the custom case needs --lambda3 and --lambda4"),
        },
    };
    let omega = a.omega.as_deref().map(parse_omega).transpose()?;
    let report = analyze_point(&sys, omega)?;
    emit(a.out.as_deref(), &to_json(&report)?)?;
    Ok(report.stabilized)
}

fn figure(a: &FigureArgs) -> CliResult<bool> {
    let grid = match &a.e_grid {
        Some(s) => parse_e_grid(s)?,
        None => default_e_grid(),
    };
    let fig: FigureData = if a.figure == 1 {
        figure_one(&grid)?
    } else {
        figure_two(&grid, a.paranoid)?
    };
    let text = match a.format {
        Format::Csv => curves_csv(&fig.curves),
        Format::Json => to_json(&fig)?,
        Format::Svg => figure_svg(&fig),
    };
    emit(Some(&a.out), &text)?;
    if let Some(p) = &a.svg {
        emit(Some(p), &figure_svg(&fig))?;
    }
    if let Some(p) = &a.regions {
        let (family, lo, hi) = if a.figure == 1 {
            (Family::NonConvex, -1.0, 3.0)
        } else {
            (Family::Convex, 0.0, BETA_MAX)
        };
        let betas: Vec<f64> = (0..=40).map(|k| round15(lo + (hi - lo) * k as f64 / 40.0)).collect();
        let map = region_classify(family, &betas, &grid)?;
        emit(Some(p), &region_csv(&map))?;
    }
    if let Some(rep) = &fig.ordering {
        if !rep.passed() {
            eprintln!("warning: ordering check reported {} violations", rep.violations.len());
        }
    }
    let brackets_ok = fig
        .curves
        .iter()
        .flat_map(|c| c.samples.iter())
        .all(|s| s.bracket <= 10.0 * ROOT_WIDTH);
    Ok(brackets_ok)
}

fn cc_limit(a: &CcLimitArgs) -> CliResult<bool> {
    let branch: Branch = a.branch.parse()?;
    let ladder = match &a.eps_ladder {
        Some(s) => parse_list(s, "eps-ladder")?,
        None => DEFAULT_LADDER.to_vec(),
    };
    if ladder.is_empty() {
        return usage("eps-ladder is empty");
    }
    let rep = eps_ladder(a.m, a.tau, branch, &ladder)?;
    let converged = rep.rows.iter().all(|r| r.cc_residual <= 1e-10);
    let mut v = serde_json::to_value(&rep).map_err(|e| CliError::Failure(e.to_string()))?;
    if let Value::Object(o) = &mut v {
        o.insert("schema".into(), json!(SCHEMA_VERSION));
        o.insert("monotone".into(), json!(rep.monotone()));
    }
    emit(a.out.as_deref(), &to_json(&v)?)?;
    Ok(converged)
}

fn reduce_cmd(a: &ReduceArgs) -> CliResult<bool> {
    let masses = parse_list(&a.masses, "masses")?;
    let masses: [f64; 4] = masses
        .try_into()
        .map_err(|_| CliError::Usage("exactly four masses are needed".into()))?;
    let points: Vec<C64> = a
        .positions
        .split(';')
        .map(|p| match parse_list(p, "positions")?.as_slice() {
            [x, y] => Ok(C64::new(*x, *y)),
            _ => usage(format!("position '{p}' must be `x,y`")),
        })
        .collect::<CliResult<_>>()?;
    let positions: [C64; 4] = points
        .try_into()
        .map_err(|_| CliError::Usage("exactly four positions are needed".into()))?;
    let (cc, params) = reduce(masses, positions)?;
    let out = json!({
        "schema": SCHEMA_VERSION,
        "masses": cc.system.masses,
        "positions": cc.system.positions,
        "mu": cc.mu,
        "cc_residual": cc_residual(&cc.system),
        "unitarity_defect": cc.unitarity_defect(),
        "lambda4": cc.lambda4,
        "beta1": params.beta1,
        "beta2": params.beta2,
        "beta11": params.beta11,
        "beta12": params.beta12,
        "beta22": params.beta22,
    });
    emit(a.out.as_deref(), &to_json(&out)?)?;
    Ok(true)
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = match raw.trim().parse() {
        Ok(n) if n > 0 => n,
        _ => return usage(format!("{THREADS_VAR} must be a positive integer, got '{raw}'")),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Failure(e.to_string()))
}

fn run(cli: &Cli) -> CliResult<bool> {
    configure_threads()?;
    match &cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Figure(a) => figure(a),
        Command::CcLimit(a) => cc_limit(a),
        Command::Reduce(a) => reduce_cmd(a),
    }
}

fn main() -> ExitCode {
    let args = match config::merge_args(std::env::args().collect()) {
        Ok(a) => a,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("warning: some computations did not stabilize");
            ExitCode::from(EXIT_UNSTABILIZED)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_FAILURE)
        }
    }
}
