//! Command-line front end for `matchbox-core`.
//!
//! Every subcommand produces a [`Table`] that is written as CSV (the default)
//! or JSON to standard output or to `--out`. Diagnostics go to standard
//! error. Output depends only on the arguments, so repeated runs with the
//! same seed are byte-identical.

pub mod figure;
pub mod table;
pub mod verify;

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use num_traits::{One, Zero};

use matchbox_core::asymptotics::{first_return_asymptotic, lambda, r_star, residue_asymptotic, classify};
use matchbox_core::expectations::{first_return_means, residue_table, ResidueMethod};
use matchbox_core::numeric::{parse_probability, parse_rational, Field, Probability, Scalar};
use matchbox_core::series::{diagonal_probabilities, first_return_pgf, s_series, TruncatedSeries};
use matchbox_core::simulator::{estimate, SimulationTarget, RNG_ALGORITHM};
use matchbox_core::Error;

pub use table::{Cell, Table};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0} verification check(s) failed")]
    VerifyFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub(crate) fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Debug, Parser)]
#[command(name = "matchbox", version, about = "Expected residue and diagonal returns of the k-box matchbox process")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Expected residue M_n for n = 1..N.
    Residue(TableArgs),
    /// Expected order R_n of the first return to a diagonal state.
    FirstReturn(TableArgs),
    /// Probabilities f_n of sitting at a diagonal state after k n steps.
    Diagonal(TableArgs),
    /// Coefficients of a generating function.
    Series(SeriesArgs),
    /// Regime, lambda, radius and leading-order estimates.
    Asymptotics(AsymptoticsArgs),
    /// Monte Carlo estimates of the residue or the first-return order.
    Simulate(SimulateArgs),
    /// Run the identity suites and report pass/fail per check.
    Verify(VerifyArgs),
    /// Write the CSV data behind the standard figures.
    Figure(FigureArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Exact,
    Float,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct ProbabilityArgs {
    /// Probability of the big chooser, as "a/b" or a decimal.
    #[arg(long, conflicts_with = "p_grid")]
    pub p: Option<String>,
    /// Grid "start:stop:steps"; endpoints equal to 0 or 1 are dropped.
    #[arg(long = "p-grid")]
    pub p_grid: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct TableArgs {
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Largest n in the table.
    #[arg(long = "n", visible_alias = "n-max")]
    pub n: usize,
    #[command(flatten)]
    pub prob: ProbabilityArgs,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    /// recursion, diagonal-sum, gf-coefficient or oracle (residue only).
    #[arg(long, default_value = "diagonal-sum")]
    pub method: String,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SeriesKind {
    /// s_n, the first-return counts.
    S,
    /// First-return probabilities g_n (needs --p).
    Pgf,
    /// Diagonal probabilities f_n (needs --p).
    Diagonal,
}

#[derive(Debug, Clone, Args)]
pub struct SeriesArgs {
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Truncation order.
    #[arg(long = "N", visible_alias = "order", default_value_t = 20)]
    pub order: usize,
    #[arg(long, value_enum, default_value_t = SeriesKind::S)]
    pub kind: SeriesKind,
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct AsymptoticsArgs {
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// n at which the estimates are evaluated.
    #[arg(long = "n", default_value_t = 100)]
    pub n: usize,
    #[command(flatten)]
    pub prob: ProbabilityArgs,
    #[arg(long, value_enum, default_value_t = Mode::Float)]
    pub mode: Mode,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long = "n")]
    pub n: u64,
    #[command(flatten)]
    pub prob: ProbabilityArgs,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// residue or first-return.
    #[arg(long, default_value = "residue")]
    pub target: String,
    #[arg(long, value_enum, default_value_t = Mode::Float)]
    pub mode: Mode,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// all, series, gf, methods, oracle, bijection, diagonal, coincidence,
    /// asymptotics or simulator.
    #[arg(long, default_value = "all")]
    pub suite: String,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long = "max-n")]
    pub max_n: Option<usize>,
    #[arg(long = "N")]
    pub order: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FigureKind {
    All,
    Residue,
    Lambda,
    Returns,
}

#[derive(Debug, Clone, Args)]
pub struct FigureArgs {
    #[arg(long, value_enum, default_value_t = FigureKind::All)]
    pub figure: FigureKind,
    /// Number of grid intervals in p.
    #[arg(long, default_value_t = 20)]
    pub steps: usize,
    #[arg(long, default_value_t = 10_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Mode::Float)]
    pub mode: Mode,
    /// Directory receiving the CSV files.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

/// Parses the arguments and runs the command.
pub fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Residue(a) => emit(&residue_cmd(&a)?, &a.output),
        Command::FirstReturn(a) => emit(&first_return_cmd(&a)?, &a.output),
        Command::Diagonal(a) => emit(&diagonal_cmd(&a)?, &a.output),
        Command::Series(a) => emit(&series_cmd(&a)?, &a.output),
        Command::Asymptotics(a) => emit(&asymptotics_cmd(&a)?, &a.output),
        Command::Simulate(a) => emit(&simulate_cmd(&a)?, &a.output),
        Command::Verify(a) => {
            let report = verify::run(&a)?;
            emit(&report.table(), &a.output)?;
            match report.failures() {
                0 => Ok(()),
                n => Err(CliError::VerifyFailed(n)),
            }
        }
        Command::Figure(a) => {
            for path in figure::run(&a)? {
                eprintln!("wrote {}", path.display());
            }
            Ok(())
        }
    }
}

/// Writes a table in the requested format.
pub fn emit(table: &Table, output: &OutputArgs) -> CliResult<()> {
    let text = match output.format {
        Format::Csv => table.to_csv(),
        Format::Json => table.to_json(),
    };
    match &output.out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn check_k(k: usize) -> CliResult<()> {
    if k < 2 {
        return Err(usage(format!("--k must be at least 2, got {k}")));
    }
    Ok(())
}

fn check_n(n: usize) -> CliResult<()> {
    if n < 1 {
        return Err(usage("--n must be at least 1"));
    }
    Ok(())
}

/// One probability or a grid of them, in the requested mode.
pub fn probabilities(args: &ProbabilityArgs, mode: Mode) -> CliResult<Vec<Probability>> {
    let float = mode == Mode::Float;
    match (&args.p, &args.p_grid) {
        (Some(p), None) => Ok(vec![parse_probability(p, float)?]),
        (None, Some(g)) => parse_grid(g, float),
        (None, None) => Err(usage("one of --p or --p-grid is required")),
        (Some(_), Some(_)) => Err(usage("--p and --p-grid are mutually exclusive")),
    }
}

/// Parses "start:stop:steps" into `steps + 1` equally spaced points, keeping
/// only those strictly between 0 and 1.
pub fn parse_grid(text: &str, float: bool) -> CliResult<Vec<Probability>> {
    let parts: Vec<&str> = text.split(':').collect();
    let [start, stop, steps] = parts.as_slice() else {
        return Err(usage(format!("grid {text:?} is not start:stop:steps")));
    };
    let start = parse_rational(start)?;
    let stop = parse_rational(stop)?;
    let steps: usize = steps
        .trim()
        .parse()
        .ok()
        .filter(|&s| s >= 1)
        .ok_or_else(|| usage(format!("grid step count in {text:?} must be a positive integer")))?;
    let width = (stop - start.clone()) / BigRational::from_integer(steps.into());
    let mut out = Vec::new();
    for i in 0..=steps {
        let v = start.clone() + width.clone() * BigRational::from_integer(i.into());
        if v <= BigRational::zero() || v >= BigRational::one() {
            continue;
        }
        out.push(if float {
            Probability::float(v.to_f64())?
        } else {
            Probability::exact(v)?
        });
    }
    if out.is_empty() {
        return Err(usage(format!("grid {text:?} has no points inside (0, 1)")));
    }
    Ok(out)
}

pub(crate) fn float_only(mode: Mode, command: &str) -> CliResult<()> {
    if mode == Mode::Exact {
        return Err(usage(format!("{command} supports only --mode float")));
    }
    Ok(())
}

fn column<T: Field + Into<Scalar>>(values: Vec<T>) -> Vec<Scalar> {
    values.into_iter().map(Into::into).collect()
}

/// Runs `f` on the concrete scalar inside `p`.
fn with_p<R>(
    p: &Probability,
    exact: impl FnOnce(&BigRational) -> matchbox_core::Result<R>,
    float: impl FnOnce(&f64) -> matchbox_core::Result<R>,
) -> CliResult<R> {
    Ok(match p.value() {
        Scalar::Exact(r) => exact(r)?,
        Scalar::Float(x) => float(x)?,
    })
}

fn n_table(
    ps: &[Probability],
    name: &str,
    first_index: usize,
    mut values: impl FnMut(&Probability) -> CliResult<Vec<Scalar>>,
) -> CliResult<Table> {
    let grid = ps.len() > 1;
    let mut table = if grid {
        Table::new(&["p", "n", name])
    } else {
        Table::new(&["n", name])
    };
    for p in ps {
        for (i, v) in values(p)?.into_iter().enumerate() {
            let mut row: Vec<Cell> = vec![(first_index + i).into(), v.into()];
            if grid {
                row.insert(0, p.value().clone().into());
            }
            table.push(row);
        }
    }
    Ok(table)
}

pub fn residue_cmd(a: &TableArgs) -> CliResult<Table> {
    check_k(a.k)?;
    check_n(a.n)?;
    let method: ResidueMethod = a.method.parse().map_err(|e: Error| usage(e.to_string()))?;
    let ps = probabilities(&a.prob, a.mode)?;
    n_table(&ps, "M_n", 1, |p| {
        with_p(
            p,
            |r| residue_table(a.k, a.n, r, method).map(column),
            |x| residue_table(a.k, a.n, x, method).map(column),
        )
    })
}

pub fn first_return_cmd(a: &TableArgs) -> CliResult<Table> {
    check_k(a.k)?;
    check_n(a.n)?;
    let ps = probabilities(&a.prob, a.mode)?;
    n_table(&ps, "R_n", 1, |p| {
        with_p(
            p,
            |r| first_return_means(a.k, a.n, r).map(column),
            |x| first_return_means(a.k, a.n, x).map(column),
        )
    })
}

pub fn diagonal_cmd(a: &TableArgs) -> CliResult<Table> {
    check_k(a.k)?;
    let ps = probabilities(&a.prob, a.mode)?;
    n_table(&ps, "f_n", 0, |p| {
        with_p(
            p,
            |r| Ok(column(diagonal_probabilities(a.k, r, a.n).into_coeffs())),
            |x| Ok(column(diagonal_probabilities(a.k, x, a.n).into_coeffs())),
        )
    })
}

pub fn series_cmd(a: &SeriesArgs) -> CliResult<Table> {
    check_k(a.k)?;
    let coeffs: Vec<Scalar> = match a.kind {
        SeriesKind::S => match a.mode {
            Mode::Exact => column(s_series::<BigRational>(a.k, a.order).into_coeffs()),
            Mode::Float => column(s_series::<f64>(a.k, a.order).into_coeffs()),
        },
        SeriesKind::Pgf | SeriesKind::Diagonal => {
            let text = a.p.as_deref().ok_or_else(|| usage("--p is required for this series"))?;
            let p = parse_probability(text, a.mode == Mode::Float)?;
            let kind = a.kind;
            let build = |s_exact: fn(usize, &BigRational, usize) -> TruncatedSeries<BigRational>,
                         s_float: fn(usize, &f64, usize) -> TruncatedSeries<f64>| {
                with_p(
                    &p,
                    |r| Ok(column(s_exact(a.k, r, a.order).into_coeffs())),
                    |x| Ok(column(s_float(a.k, x, a.order).into_coeffs())),
                )
            };
            if kind == SeriesKind::Pgf {
                build(first_return_pgf, first_return_pgf)?
            } else {
                build(diagonal_probabilities, diagonal_probabilities)?
            }
        }
    };
    let mut table = Table::new(&["n", "coefficient"]);
    for (i, c) in coeffs.into_iter().enumerate() {
        table.push(vec![i.into(), c.into()]);
    }
    Ok(table)
}

pub fn asymptotics_cmd(a: &AsymptoticsArgs) -> CliResult<Table> {
    check_k(a.k)?;
    check_n(a.n)?;
    float_only(a.mode, "asymptotics")?;
    let ps = probabilities(&a.prob, a.mode)?;
    let mut table = Table::new(&["p", "regime", "lambda", "r_star", "estimate", "return_estimate"]);
    for p in ps {
        let x = p.to_f64();
        table.push(vec![
            x.into(),
            classify(a.k, &x).to_string().into(),
            lambda(a.k, &x)?.into(),
            r_star(a.k, &x).into(),
            residue_asymptotic(a.k, a.n, &x)?.into(),
            first_return_asymptotic(a.k, a.n, &x)?.into(),
        ]);
    }
    Ok(table)
}

pub fn simulate_cmd(a: &SimulateArgs) -> CliResult<Table> {
    check_k(a.k)?;
    if a.n < 1 {
        return Err(usage("--n must be at least 1"));
    }
    if a.trials < 1 {
        return Err(usage("--trials must be at least 1"));
    }
    float_only(a.mode, "simulate")?;
    let target: SimulationTarget = a.target.parse().map_err(|e: Error| usage(e.to_string()))?;
    let ps = probabilities(&a.prob, a.mode)?;
    let mut table = Table::new(&["p", "n", "k", "trials", "seed", "mean", "stderr"])
        .with_meta("rng", RNG_ALGORITHM)
        .with_meta("target", &target.to_string());
    for p in ps {
        let r = estimate(a.k, a.n, p.to_f64(), a.trials, a.seed, target)?;
        table.push(vec![
            r.p.into(),
            r.n.into(),
            r.k.into(),
            r.samples.into(),
            Cell::Text(r.seed.to_string()),
            r.mean.into(),
            r.stderr.into(),
        ]);
    }
    Ok(table)
}
