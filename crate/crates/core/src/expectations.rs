//! Expected residue `M_n` and expected first-return order `R_n`.
//!
//! Four independent routes to `M_n` are provided:
//!
//! * [`ResidueMethod::Recursion`]: the renewal decomposition
//!   `M_n = sum_{0<i<n} s_i p^{(k-1)i} q^{i-1} M_{n-i} + L_n`, where `L_n`
//!   collects trajectories that never revisit a diagonal state.
//! * [`ResidueMethod::DiagonalSum`]: `(k-1)n - (p/q) sum_{i<n} (1 - f_i)`.
//! * [`ResidueMethod::GfCoefficient`]: coefficient extraction from
//!   `(k - 1/q) z/(1-z)^2 + (p/q) z/(1-z) f(z)` using series products.
//! * [`ResidueMethod::Oracle`]: exhaustive expansion of every trajectory of
//!   the chooser process with polynomial weights in `p`.
//!
//! The pure recursions only need ring operations, so they also run over
//! [`Polynomial`]s and produce `M_n` symbolically.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::combinatorics::{d_count, s_count};
use crate::error::{Error, Result};
use crate::numeric::{complement, Field, Ring};
use crate::poly::Polynomial;
use crate::series::{diagonal_probabilities, first_return_pgf, TruncatedSeries};
use crate::simulator::ProcessState;

/// Largest `k * n` accepted by the exhaustive-expansion oracle
/// (at most `2^{kn}` trajectories).
pub const ORACLE_LIMIT: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ResidueMethod {
    Recursion,
    DiagonalSum,
    GfCoefficient,
    Oracle,
}

impl ResidueMethod {
    pub const ALL: [ResidueMethod; 4] = [
        ResidueMethod::Recursion,
        ResidueMethod::DiagonalSum,
        ResidueMethod::GfCoefficient,
        ResidueMethod::Oracle,
    ];
}

impl fmt::Display for ResidueMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResidueMethod::Recursion => "recursion",
            ResidueMethod::DiagonalSum => "diagonal-sum",
            ResidueMethod::GfCoefficient => "gf-coefficient",
            ResidueMethod::Oracle => "oracle",
        })
    }
}

impl FromStr for ResidueMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('_', "-").as_str() {
            "recursion" => Ok(ResidueMethod::Recursion),
            "diagonal-sum" => Ok(ResidueMethod::DiagonalSum),
            "gf-coefficient" | "gf" => Ok(ResidueMethod::GfCoefficient),
            "oracle" => Ok(ResidueMethod::Oracle),
            _ => Err(Error::InvalidArgument(format!("unknown method {s:?}"))),
        }
    }
}

fn check_k(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k must be at least 2, got {k}")));
    }
    Ok(())
}

fn check_kn(k: usize, n: usize) -> Result<()> {
    check_k(k)?;
    if n < 1 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    Ok(())
}

/// Expected residue from the first-phase state where the `k - 1` larger boxes
/// hold `a` matches in total and the smallest box holds `b`.
///
/// Tabulated over the wedge `a' >= (k-1) b'`, row by row in `b'`, so the
/// cost is `O(a b)` time and `O(a)` memory with no recursion depth.
pub fn first_phase_expectation<T: Ring>(k: usize, a: usize, b: usize, p: &T) -> Result<T> {
    check_k(k)?;
    let k1 = k - 1;
    if a < k1 * b {
        return Err(Error::InvalidWedge { k, a, b });
    }
    let q = complement(p);
    // row[a'] = First_{a', b'} for the current b'; entries below the wedge unused.
    let mut row: Vec<T> = (0..=a).map(|x| T::from_u64(x as u64)).collect();
    for level in 1..=b {
        let lo = k1 * level;
        let mut next = row.clone();
        next[lo] = row[lo].clone();
        for x in lo + 1..=a {
            next[x] = p.clone() * next[x - 1].clone() + q.clone() * row[x].clone();
        }
        row = next;
    }
    Ok(row[a].clone())
}

/// Contribution to `M_n` of trajectories that never return to a diagonal
/// state: `sum_j j d_{n,j} p^{(k-1)n-j} q^{n-1}`.
pub fn l_value<T: Ring>(k: usize, n: usize, p: &T) -> Result<T> {
    check_k(k)?;
    if n < 2 {
        return Err(Error::InvalidArgument("l_value requires n >= 2".into()));
    }
    let q = complement(p);
    let top = (k - 1) * n;
    let q_part = q.powu(n - 1);
    let mut sum = T::zero();
    for j in k..=top {
        let d = d_count(k, n, j);
        if d == BigInt::from(0) {
            continue;
        }
        let coeff = T::from_bigint(&(d * BigInt::from(j)));
        sum = sum + coeff * p.powu(top - j);
    }
    Ok(sum * q_part)
}

/// Series whose coefficient of `z^n` is `L_n` (zero for `n < 2`), from the
/// closed form
/// `[z(kp-(k-1)) S(p^{k-1}qz) - q z^2 ((2k-1)p - (2k-2) + (k-1)qz)] / (q^2 (1-z)^2)`.
pub fn l_series<T: Field>(k: usize, p: &T, order: usize) -> TruncatedSeries<T> {
    let q = complement(p);
    let kk = T::from_u64(k as u64);
    let k1 = T::from_u64(k as u64 - 1);
    // S(p^{k-1} q z) = q * pgf(z)
    let s_scaled = first_return_pgf(k, p, order).scale(&q);
    let z = TruncatedSeries::<T>::z(order);
    let z2 = &z * &z;
    let first = (&z * &s_scaled).scale(&(kk.clone() * p.clone() - k1.clone()));
    let two_k1 = T::from_u64(2 * k as u64 - 1);
    let two_k2 = T::from_u64(2 * k as u64 - 2);
    let linear = TruncatedSeries::one(order).scale(&(two_k1 * p.clone() - two_k2)) + z.scale(&(k1 * q.clone()));
    let second = (&z2 * &linear).scale(&q);
    let inv_sq = TruncatedSeries::new((0..=order).map(|n| T::from_u64(n as u64 + 1)).collect());
    (&(first - second) * &inv_sq).scale(&(T::one() / (q.clone() * q)))
}

/// `M_1 .. M_{n_max}` by the renewal recursion over first diagonal returns.
pub fn residue_recursion<T: Ring>(k: usize, n_max: usize, p: &T) -> Result<Vec<T>> {
    check_kn(k, n_max)?;
    let q = complement(p);
    // alpha_i = s_i p^{(k-1)i} q^{i-1}
    let alpha: Vec<T> = (1..n_max)
        .map(|i| T::from_bigint(&s_count(k, i)) * p.powu((k - 1) * i) * q.powu(i - 1))
        .collect();
    let mut m: Vec<T> = Vec::with_capacity(n_max);
    m.push(T::from_u64(k as u64 - 1));
    for n in 2..=n_max {
        let mut value = l_value(k, n, p)?;
        for i in 1..n {
            value = value + alpha[i - 1].clone() * m[n - i - 1].clone();
        }
        m.push(value);
    }
    Ok(m)
}

/// `M_1 .. M_{n_max}` from diagonal-state probabilities:
/// `M_n = (k-1)n - (p/q) sum_{i<n} (1 - f_i)`.
pub fn residue_diagonal_sum<T: Field>(k: usize, n_max: usize, p: &T) -> Result<Vec<T>> {
    check_kn(k, n_max)?;
    let q = complement(p);
    let ratio = p.clone() / q;
    let f = diagonal_probabilities(k, p, n_max - 1);
    let mut deficit = T::zero();
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        deficit = deficit + (T::one() - f.coeff(n - 1).clone());
        let linear = T::from_u64(((k - 1) * n) as u64);
        out.push(linear - ratio.clone() * deficit.clone());
    }
    Ok(out)
}

/// `M_1 .. M_N` as coefficients of the residue generating function
/// `(k - 1/q) z/(1-z)^2 + (p/q) z/(1-z) f(z)`.
pub fn residue_series<T: Field>(k: usize, p: &T, order: usize) -> Result<Vec<T>> {
    check_kn(k, order)?;
    let q = complement(p);
    let f = diagonal_probabilities(k, p, order);
    let z = TruncatedSeries::<T>::z(order);
    let geometric = TruncatedSeries::<T>::geometric(order);
    let z_over = &z * &geometric;
    let z_over_sq = &z_over * &geometric;
    let linear_coeff = T::from_u64(k as u64) - T::one() / q.clone();
    let m = z_over_sq.scale(&linear_coeff) + (&z_over * &f).scale(&(p.clone() / q));
    Ok(m.into_coeffs().into_iter().skip(1).collect())
}

/// Brute-force `M_n` as an exact polynomial in `p`, summing residue times
/// weight over every trajectory until the smallest box first empties.
pub fn residue_oracle(k: usize, n: usize) -> Result<Polynomial<BigRational>> {
    check_kn(k, n)?;
    if k * n > ORACLE_LIMIT {
        return Err(Error::EnumerationTooLarge {
            size: k * n,
            limit: ORACLE_LIMIT,
        });
    }
    type P = Polynomial<BigRational>;
    let p = P::x();
    let q = P::one() - P::x();

    fn expand(state: &ProcessState, weight: P, p: &P, q: &P, acc: &mut P) {
        if state.is_absorbed() {
            let residue = P::from_u64(state.residue());
            *acc = std::mem::replace(acc, P::zero()) + weight * residue;
            return;
        }
        for (big, w) in [(true, p), (false, q)] {
            let next = state.step(big).expect("non-absorbed state has a non-empty box");
            expand(&next, weight.clone() * w.clone(), p, q, acc);
        }
    }

    let mut acc = P::zero();
    expand(&ProcessState::initial(k, n as u64), P::one(), &p, &q, &mut acc);
    Ok(acc)
}

/// `M_n` by the chosen method.
pub fn expected_residue<T: Field>(k: usize, n: usize, p: &T, method: ResidueMethod) -> Result<T> {
    check_kn(k, n)?;
    let mut all = match method {
        ResidueMethod::Recursion => residue_recursion(k, n, p)?,
        ResidueMethod::DiagonalSum => residue_diagonal_sum(k, n, p)?,
        ResidueMethod::GfCoefficient => residue_series(k, p, n)?,
        ResidueMethod::Oracle => {
            return Ok(residue_oracle(k, n)?.eval_with(p, T::from_rational));
        }
    };
    Ok(all.swap_remove(n - 1))
}

/// `M_1 .. M_{n_max}` by the chosen method.
pub fn residue_table<T: Field>(k: usize, n_max: usize, p: &T, method: ResidueMethod) -> Result<Vec<T>> {
    match method {
        ResidueMethod::Recursion => residue_recursion(k, n_max, p),
        ResidueMethod::DiagonalSum => residue_diagonal_sum(k, n_max, p),
        ResidueMethod::GfCoefficient => residue_series(k, p, n_max),
        ResidueMethod::Oracle => (1..=n_max)
            .map(|n| expected_residue(k, n, p, ResidueMethod::Oracle))
            .collect(),
    }
}

/// `R_1 .. R_{n_max}` with `R_n = n - sum_{i<n} (n-i) g_i`, `g_i` the
/// first-return probabilities.
pub fn first_return_means<T: Field>(k: usize, n_max: usize, p: &T) -> Result<Vec<T>> {
    check_kn(k, n_max)?;
    let g = first_return_pgf(k, p, n_max);
    // R_n = n (1 - G1) + G2 with G1 = sum_{i<n} g_i, G2 = sum_{i<n} i g_i.
    let mut g1 = T::zero();
    let mut g2 = T::zero();
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        if n > 1 {
            let gi = g.coeff(n - 1).clone();
            g1 = g1 + gi.clone();
            g2 = g2 + gi * T::from_u64(n as u64 - 1);
        }
        out.push(T::from_u64(n as u64) * (T::one() - g1.clone()) + g2.clone());
    }
    Ok(out)
}

/// Expected order `R_n` of the first return to a diagonal state.
pub fn expected_first_return<T: Field>(k: usize, n: usize, p: &T) -> Result<T> {
    Ok(first_return_means(k, n, p)?.swap_remove(n - 1))
}

/// Law of the first-return order `Y` from `(n, ..., n)`, with the mass of
/// trajectories that empty a box first placed at `Y = n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReturnDistribution<T> {
    pub k: usize,
    pub n: usize,
    pub p: T,
    /// `probs[i - 1] = P(Y = i)` for `i = 1 ..= n`.
    pub probs: Vec<T>,
}

impl<T: Field> ReturnDistribution<T> {
    pub fn prob(&self, i: usize) -> &T {
        &self.probs[i - 1]
    }

    pub fn total(&self) -> T {
        self.probs.iter().fold(T::zero(), |acc, x| acc + x.clone())
    }

    pub fn mean(&self) -> T {
        self.probs
            .iter()
            .enumerate()
            .fold(T::zero(), |acc, (i, x)| acc + x.clone() * T::from_u64(i as u64 + 1))
    }
}

pub fn first_return_distribution<T: Field>(k: usize, n: usize, p: &T) -> Result<ReturnDistribution<T>> {
    check_kn(k, n)?;
    let q = complement(p);
    let mut probs: Vec<T> = (1..n)
        .map(|i| T::from_bigint(&s_count(k, i)) * p.powu((k - 1) * i) * q.powu(i - 1))
        .collect();
    let used = probs.iter().fold(T::zero(), |acc, x| acc + x.clone());
    probs.push(T::one() - used);
    Ok(ReturnDistribution {
        k,
        n,
        p: p.clone(),
        probs,
    })
}
