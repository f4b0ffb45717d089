//! Seeded Monte Carlo simulation of the chooser process.
//!
//! Every trial draws from its own ChaCha8 stream keyed by `(seed, trial)`,
//! and per-trial samples are aggregated as exact integers, so results do not
//! depend on the number of worker threads.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Identifier of the generator behind [`estimate`], recorded with results.
pub const RNG_ALGORITHM: &str = "chacha8";

/// Box contents, kept sorted in descending order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ProcessState {
    boxes: Vec<u64>,
}

/// Which of several equal boxes a chooser takes from, for states tracked
/// without sorting.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TieBreak {
    First,
    Last,
}

impl ProcessState {
    pub fn initial(k: usize, n: u64) -> Self {
        ProcessState { boxes: vec![n; k] }
    }

    pub fn new(mut boxes: Vec<u64>) -> Result<Self> {
        if boxes.len() < 2 {
            return Err(Error::InvalidArgument("at least two boxes are required".into()));
        }
        boxes.sort_unstable_by(|a, b| b.cmp(a));
        Ok(ProcessState { boxes })
    }

    pub fn boxes(&self) -> &[u64] {
        &self.boxes
    }

    pub fn k(&self) -> usize {
        self.boxes.len()
    }

    /// Some box is empty.
    pub fn is_absorbed(&self) -> bool {
        self.boxes.last() == Some(&0)
    }

    /// All boxes hold the same count.
    pub fn is_diagonal(&self) -> bool {
        self.boxes.first() == self.boxes.last()
    }

    /// Total matches left.
    pub fn residue(&self) -> u64 {
        self.boxes.iter().sum()
    }

    /// One draw: the big chooser takes from a fullest box, the little chooser
    /// from an emptiest one.
    pub fn step(&self, is_big: bool) -> Result<Self> {
        let mut next = self.clone();
        next.step_in_place(is_big)?;
        Ok(next)
    }

    fn step_in_place(&mut self, is_big: bool) -> Result<()> {
        let k = self.boxes.len();
        if is_big {
            if self.boxes[0] == 0 {
                return Err(Error::EmptyBox);
            }
            // Decrement the last of the maximal run so the order is kept.
            let top = self.boxes[0];
            let idx = self.boxes.iter().rposition(|&b| b == top).unwrap_or(0);
            self.boxes[idx] -= 1;
        } else {
            if self.boxes[k - 1] == 0 {
                return Err(Error::EmptyBox);
            }
            // The last box is minimal and decrementing it keeps the order.
            self.boxes[k - 1] -= 1;
        }
        Ok(())
    }
}

impl fmt::Display for ProcessState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, b) in self.boxes.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{b}")?;
        }
        f.write_str(")")
    }
}

/// Step on an unsorted, labelled state; ties resolved per `tie`.
pub fn step_labelled(boxes: &mut [u64], is_big: bool, tie: TieBreak) -> Result<()> {
    let target = if is_big {
        boxes.iter().copied().max()
    } else {
        boxes.iter().copied().min()
    }
    .ok_or(Error::EmptyBox)?;
    if target == 0 {
        return Err(Error::EmptyBox);
    }
    let idx = match tie {
        TieBreak::First => boxes.iter().position(|&b| b == target),
        TieBreak::Last => boxes.iter().rposition(|&b| b == target),
    }
    .expect("target value is present");
    boxes[idx] -= 1;
    Ok(())
}

fn check(k: usize, n: u64, p: f64) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k must be at least 2, got {k}")));
    }
    if n < 1 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::ProbabilityOutOfRange(p.to_string()));
    }
    Ok(())
}

/// Runs until some box first empties and returns the matches left.
/// `observe` sees every state visited before absorption, the start included.
pub fn run_residue_observed<R: Rng + ?Sized>(
    k: usize,
    n: u64,
    p: f64,
    rng: &mut R,
    mut observe: impl FnMut(&ProcessState),
) -> Result<u64> {
    check(k, n, p)?;
    let mut state = ProcessState::initial(k, n);
    while !state.is_absorbed() {
        observe(&state);
        let big = rng.random_bool(p);
        state.step_in_place(big)?;
    }
    Ok(state.residue())
}

pub fn run_residue<R: Rng + ?Sized>(k: usize, n: u64, p: f64, rng: &mut R) -> Result<u64> {
    run_residue_observed(k, n, p, rng, |_| {})
}

/// Order `Y` of the first return to a diagonal state after leaving
/// `(n, ..., n)`; `n` if a box empties first.
pub fn run_first_return<R: Rng + ?Sized>(k: usize, n: u64, p: f64, rng: &mut R) -> Result<u64> {
    check(k, n, p)?;
    let mut state = ProcessState::initial(k, n);
    loop {
        let big = rng.random_bool(p);
        state.step_in_place(big)?;
        if state.is_absorbed() {
            return Ok(n);
        }
        if state.is_diagonal() {
            return Ok(n - state.boxes[0]);
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SimulationTarget {
    Residue,
    FirstReturn,
}

impl fmt::Display for SimulationTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SimulationTarget::Residue => "residue",
            SimulationTarget::FirstReturn => "first-return",
        })
    }
}

impl std::str::FromStr for SimulationTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('_', "-").as_str() {
            "residue" => Ok(SimulationTarget::Residue),
            "first-return" => Ok(SimulationTarget::FirstReturn),
            _ => Err(Error::InvalidArgument(format!("unknown target {s:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SimulationResult {
    pub k: usize,
    pub n: u64,
    pub p: f64,
    pub target: SimulationTarget,
    pub samples: u64,
    pub mean: f64,
    pub stderr: f64,
    pub seed: u64,
}

impl SimulationResult {
    pub const CSV_HEADER: &'static str = "p,n,k,trials,seed,mean,stderr";

    pub fn csv_row(&self) -> String {
        use crate::numeric::format_float;
        format!(
            "{},{},{},{},{},{},{}",
            format_float(self.p),
            self.n,
            self.k,
            self.samples,
            self.seed,
            format_float(self.mean),
            format_float(self.stderr)
        )
    }
}

/// Generator for trial `index` under `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Draws `trials` independent samples in parallel.
pub fn sample(k: usize, n: u64, p: f64, trials: u64, seed: u64, target: SimulationTarget) -> Result<Vec<u64>> {
    check(k, n, p)?;
    (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            match target {
                SimulationTarget::Residue => run_residue(k, n, p, &mut rng),
                SimulationTarget::FirstReturn => run_first_return(k, n, p, &mut rng),
            }
        })
        .collect()
}

/// Sample mean and standard error over `trials` replications.
pub fn estimate(k: usize, n: u64, p: f64, trials: u64, seed: u64, target: SimulationTarget) -> Result<SimulationResult> {
    if trials < 1 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    check(k, n, p)?;
    let (sum, sum_sq) = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let x = match target {
                SimulationTarget::Residue => run_residue(k, n, p, &mut rng),
                SimulationTarget::FirstReturn => run_first_return(k, n, p, &mut rng),
            }
            .expect("parameters already checked") as u128;
            (x, x * x)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    Ok(summarise(k, n, p, target, trials, seed, sum, sum_sq))
}

#[allow(clippy::too_many_arguments)]
fn summarise(
    k: usize,
    n: u64,
    p: f64,
    target: SimulationTarget,
    trials: u64,
    seed: u64,
    sum: u128,
    sum_sq: u128,
) -> SimulationResult {
    let t = trials as u128;
    let mean = sum as f64 / trials as f64;
    let stderr = if trials < 2 {
        0.0
    } else {
        // Exact integer numerator of the unbiased sample variance.
        let numerator = t * sum_sq - sum * sum;
        let variance = numerator as f64 / (trials as f64 * (trials - 1) as f64);
        (variance / trials as f64).sqrt()
    };
    SimulationResult {
        k,
        n,
        p,
        target,
        samples: trials,
        mean,
        stderr,
        seed,
    }
}
