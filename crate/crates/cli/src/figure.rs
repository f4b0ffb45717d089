//! CSV data for the standard figures.
//!
//! * `residue_k3_n100.csv`: `M_100` for `k = 3` over a grid in `p`, exact
//!   engine next to a Monte Carlo estimate.
//! * `lambda.csv`: return probability `lambda` for `k = 2..5`.
//! * `first_return_k3_n100.csv`: `R_100` for `k = 3`, exact and simulated.

use std::fs;
use std::path::PathBuf;

use num_rational::BigRational;

use matchbox_core::asymptotics::lambda;
use matchbox_core::expectations::{first_return_means, residue_diagonal_sum};
use matchbox_core::numeric::{complement, Field};
use matchbox_core::simulator::{estimate, SimulationTarget};

use crate::table::Table;
use crate::{float_only, usage, CliResult, FigureArgs, FigureKind};

pub const FIGURE_K: usize = 3;
pub const FIGURE_N: usize = 100;
pub const LAMBDA_KS: [usize; 4] = [2, 3, 4, 5];

/// Interior grid points `i / steps`, `0 < i < steps`.
fn grid(steps: usize) -> Vec<BigRational> {
    (1..steps)
        .map(|i| BigRational::new((i as i64).into(), (steps as i64).into()))
        .collect()
}

/// Exact `M_n` or `R_n` beside a Monte Carlo estimate.
pub fn process_table(args: &FigureArgs, target: SimulationTarget) -> CliResult<Table> {
    let mut table = Table::new(&["p", "exact", "mc_mean", "mc_stderr"])
        .with_meta("rng", matchbox_core::simulator::RNG_ALGORITHM);
    for p in grid(args.steps) {
        let exact = match target {
            SimulationTarget::Residue => residue_diagonal_sum(FIGURE_K, FIGURE_N, &p)?,
            SimulationTarget::FirstReturn => first_return_means(FIGURE_K, FIGURE_N, &p)?,
        }[FIGURE_N - 1]
            .to_f64();
        let x = p.to_f64();
        let sim = estimate(FIGURE_K, FIGURE_N as u64, x, args.trials, args.seed, target)?;
        table.push(vec![x.into(), exact.into(), sim.mean.into(), sim.stderr.into()]);
    }
    Ok(table)
}

pub fn lambda_table(args: &FigureArgs) -> CliResult<Table> {
    let mut table = Table::new(&["k", "p", "q", "lambda"]);
    for k in LAMBDA_KS {
        for p in grid(args.steps) {
            let x = p.to_f64();
            table.push(vec![k.into(), x.into(), complement(&p).to_f64().into(), lambda(k, &x)?.into()]);
        }
    }
    Ok(table)
}

/// Writes the selected figures into `args.out` and returns the paths.
pub fn run(args: &FigureArgs) -> CliResult<Vec<PathBuf>> {
    float_only(args.mode, "figure")?;
    if args.steps < 2 {
        return Err(usage("--steps must be at least 2"));
    }
    if args.trials < 1 {
        return Err(usage("--trials must be at least 1"));
    }
    fs::create_dir_all(&args.out)?;
    let want = |k: FigureKind| args.figure == FigureKind::All || args.figure == k;
    let mut written = Vec::new();
    let mut write = |name: &str, table: Table| -> CliResult<()> {
        let path = args.out.join(name);
        fs::write(&path, table.to_csv())?;
        written.push(path);
        Ok(())
    };
    if want(FigureKind::Residue) {
        write("residue_k3_n100.csv", process_table(args, SimulationTarget::Residue)?)?;
    }
    if want(FigureKind::Lambda) {
        write("lambda.csv", lambda_table(args)?)?;
    }
    if want(FigureKind::Returns) {
        write("first_return_k3_n100.csv", process_table(args, SimulationTarget::FirstReturn)?)?;
    }
    Ok(written)
}
