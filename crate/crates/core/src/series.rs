//! Truncated formal power series and the generating functions built on them:
//! the first-return count series `S(z)`, the first-return probability
//! generating function `S(p^{k-1} q z) / q`, and the diagonal-state
//! probabilities `f_n`.

use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::combinatorics::{s_ratio, paths_count, s_count};
use crate::error::{Error, Result};
use crate::numeric::{binomial, complement, Field, Ring, Scalar};

/// Coefficients `c_0 .. c_N` of a power series known modulo `z^{N+1}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<T> {
    coeffs: Vec<T>,
}

impl<T: Ring> TruncatedSeries<T> {
    /// Panics on an empty coefficient vector; order N needs N + 1 entries.
    pub fn new(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "a truncated series needs at least c_0");
        TruncatedSeries { coeffs }
    }

    pub fn zero(order: usize) -> Self {
        TruncatedSeries {
            coeffs: vec![T::zero(); order + 1],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = T::one();
        s
    }

    /// The series `z` truncated at `order`.
    pub fn z(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order >= 1 {
            s.coeffs[1] = T::one();
        }
        s
    }

    /// `1 / (1 - z) = 1 + z + z^2 + ...`
    pub fn geometric(order: usize) -> Self {
        TruncatedSeries {
            coeffs: vec![T::one(); order + 1],
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &T {
        &self.coeffs[i]
    }

    pub fn truncate(mut self, order: usize) -> Self {
        self.coeffs.truncate(order + 1);
        self
    }

    pub fn scale(&self, c: &T) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|x| x.clone() * c.clone()).collect(),
        }
    }

    /// Substitution `z -> a z`.
    pub fn scale_argument(&self, a: &T) -> Self {
        let mut power = T::one();
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let v = c.clone() * power.clone();
                power = power.clone() * a.clone();
                v
            })
            .collect();
        TruncatedSeries { coeffs }
    }

    /// Horner evaluation of the truncated polynomial.
    pub fn evaluate(&self, z: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * z.clone() + c.clone())
    }

    /// Formal derivative, one order lower.
    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Self::zero(0);
        }
        TruncatedSeries {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c.clone() * T::from_u64(i as u64))
                .collect(),
        }
    }
}

impl<T: Field> TruncatedSeries<T> {
    /// Multiplicative inverse; `c_0` must be non-zero.
    pub fn reciprocal(&self) -> Result<Self> {
        let c0 = &self.coeffs[0];
        if c0.is_zero() {
            return Err(Error::NonUnitConstant);
        }
        let inv0 = T::one() / c0.clone();
        let mut out: Vec<T> = Vec::with_capacity(self.coeffs.len());
        out.push(inv0.clone());
        for n in 1..self.coeffs.len() {
            let mut acc = T::zero();
            for i in 1..=n {
                if !self.coeffs[i].is_zero() {
                    acc = acc + self.coeffs[i].clone() * out[n - i].clone();
                }
            }
            out.push(-(acc * inv0.clone()));
        }
        Ok(TruncatedSeries { coeffs: out })
    }
}

impl<T: Ring + Into<Scalar>> TruncatedSeries<T> {
    /// CSV rows `n,coefficient` with a header line.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,coefficient\n");
        for (n, c) in self.coeffs.iter().enumerate() {
            let _ = writeln!(out, "{n},{}", c.clone().into());
        }
        out
    }
}

impl<T: Ring> Add for TruncatedSeries<T> {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        let order = self.order().min(rhs.order());
        let coeffs = self
            .coeffs
            .into_iter()
            .zip(rhs.coeffs)
            .take(order + 1)
            .map(|(a, b)| a + b)
            .collect();
        TruncatedSeries { coeffs }
    }
}

impl<T: Ring> Neg for TruncatedSeries<T> {
    type Output = Self;

    fn neg(self) -> Self {
        TruncatedSeries {
            coeffs: self.coeffs.into_iter().map(|c| -c).collect(),
        }
    }
}

impl<T: Ring> Sub for TruncatedSeries<T> {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<T: Ring> Mul for TruncatedSeries<T> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        &self * &rhs
    }
}

impl<T: Ring> Mul for &TruncatedSeries<T> {
    type Output = TruncatedSeries<T>;

    fn mul(self, rhs: Self) -> TruncatedSeries<T> {
        let order = self.order().min(rhs.order());
        let mut out = vec![T::zero(); order + 1];
        for (i, a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate().take(order + 1 - i) {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        TruncatedSeries { coeffs: out }
    }
}

/// `S(z) = sum_{i >= 1} s_i z^i` through order `order`.
pub fn s_series<T: Ring>(k: usize, order: usize) -> TruncatedSeries<T> {
    assert!(k >= 2, "s_series requires k >= 2");
    let mut coeffs = vec![T::zero()];
    coeffs.extend((1..=order).map(|i| T::from_bigint(&s_count(k, i))));
    TruncatedSeries { coeffs }
}

/// First-return probability generating function `S(p^{k-1} q z) / q`.
///
/// Coefficient `i` is `s_i p^{(k-1)i} q^{i-1}`. The weights are built from
/// the ratio `s_{i+1} / s_i` so that floating-point evaluation stays finite
/// for large orders.
pub fn first_return_pgf<T: Field>(k: usize, p: &T, order: usize) -> TruncatedSeries<T> {
    assert!(k >= 2, "first_return_pgf requires k >= 2");
    let q = complement(p);
    let step = p.powu(k - 1) * q;
    let mut coeffs = Vec::with_capacity(order + 1);
    coeffs.push(T::zero());
    if order >= 1 {
        let mut w = p.powu(k - 1);
        coeffs.push(w.clone());
        for i in 1..order {
            w = w * T::from_rational(&s_ratio(k, i)) * step.clone();
            coeffs.push(w.clone());
        }
    }
    TruncatedSeries { coeffs }
}

/// `f_0 .. f_N`, the probabilities of sitting at a diagonal state after
/// `kn` steps: the reciprocal of `1 - S(p^{k-1} q z) / q`.
pub fn diagonal_probabilities<T: Field>(k: usize, p: &T, order: usize) -> TruncatedSeries<T> {
    let g = first_return_pgf(k, p, order);
    // With c_0 = 1 the reciprocal reduces to the renewal recursion
    // f_n = sum_{i=1}^{n} g_i f_{n-i}.
    let mut f: Vec<T> = Vec::with_capacity(order + 1);
    f.push(T::one());
    for n in 1..=order {
        let mut acc = T::zero();
        for i in 1..=n {
            acc = acc + g.coeffs[i].clone() * f[n - i].clone();
        }
        f.push(acc);
    }
    TruncatedSeries { coeffs: f }
}

/// Closed form `f_n = p^{(k-1)n} sum_{i<n} (n-i)/n C((k-1)n+i-1, i) q^i`.
pub fn diagonal_probability_closed<T: Field>(k: usize, p: &T, n: usize) -> T {
    assert!(k >= 2 && n >= 1, "diagonal_probability_closed requires k >= 2 and n >= 1");
    let q = complement(p);
    let mut sum = T::zero();
    let mut q_pow = T::one();
    for i in 0..n {
        let c = binomial(((k - 1) * n + i - 1) as u64, i as i64) * BigInt::from(n - i);
        let coeff = BigRational::new(c, BigInt::from(n));
        sum = sum + T::from_rational(&coeff) * q_pow.clone();
        q_pow = q_pow * q.clone();
    }
    p.powu((k - 1) * n) * sum
}

/// `f_n` as a weighted sum over revisit-refined path counts:
/// `p^{(k-1)n} sum_i paths_k(n, i) q^{n-1-i}`.
pub fn diagonal_probability_from_paths<T: Ring>(k: usize, p: &T, n: usize) -> T {
    assert!(k >= 2 && n >= 1);
    let q = complement(p);
    let sum = (0..n).fold(T::zero(), |acc, i| {
        acc + T::from_bigint(&paths_count(k, n, i)) * q.powu(n - 1 - i)
    });
    p.powu((k - 1) * n) * sum
}

/// Radius of convergence `(k-1)^{k-1} / k^k` of `S(z)`.
pub fn s_radius(k: usize) -> f64 {
    let k1 = (k - 1) as f64;
    k1.powi(k as i32 - 1) / (k as f64).powi(k as i32)
}

/// Known closed forms of `S(w)` for `k = 2` and `k = 3`.
pub fn closed_form_s(k: usize, w: f64) -> Result<f64> {
    if k != 2 && k != 3 {
        return Err(Error::InvalidArgument(format!(
            "closed forms are only available for k = 2 and k = 3, got {k}"
        )));
    }
    let limit = s_radius(k);
    if !(0.0..limit).contains(&w) {
        return Err(Error::Domain { value: w, limit });
    }
    Ok(if k == 2 {
        (1.0 - (1.0 - 4.0 * w).sqrt()) / 2.0
    } else {
        let angle = (27.0 * w / 4.0).sqrt().asin() / 3.0;
        4.0 / 3.0 * angle.sin().powi(2)
    })
}

/// Absolute difference between the closed form of `S(w)` and the truncated
/// series of the given order evaluated at `w`.
pub fn closed_form_check(k: usize, w: f64, order: usize) -> Result<f64> {
    let closed = closed_form_s(k, w)?;
    let series: f64 = s_series::<f64>(k, order).evaluate(&w);
    Ok((closed - series).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, Zero};
    use proptest::prelude::*;

    type Q = BigRational;

    fn r(a: i64, b: i64) -> Q {
        Q::new(a.into(), b.into())
    }

    fn ints(v: &[i64]) -> Vec<Q> {
        v.iter().map(|&x| r(x, 1)).collect()
    }

    #[test]
    fn s_series_examples() {
        assert_eq!(s_series::<Q>(2, 6).coeffs(), ints(&[0, 1, 1, 2, 5, 14, 42]).as_slice());
        assert_eq!(s_series::<Q>(3, 6).coeffs(), ints(&[0, 1, 2, 7, 30, 143, 728]).as_slice());
        assert_eq!(s_series::<Q>(4, 3).coeffs(), ints(&[0, 1, 3, 15]).as_slice());
    }

    #[test]
    fn functional_equation_residual() {
        for k in 2..=6 {
            let n = 30;
            let s = s_series::<Q>(k, n);
            let one_minus = TruncatedSeries::one(n) - s.clone();
            let mut lhs = s;
            for _ in 0..k - 1 {
                lhs = &lhs * &one_minus;
            }
            let residual = lhs - TruncatedSeries::z(n);
            assert!(residual.coeffs().iter().all(Zero::is_zero), "k={k}");
        }
    }

    #[test]
    fn pgf_coefficients() {
        let g = first_return_pgf(3, &r(1, 2), 3);
        assert!(g.coeff(0).is_zero());
        assert_eq!(g.coeff(1), &r(1, 4));
        assert_eq!(g.coeff(2), &r(1, 16));
        for k in 2..=5 {
            for p in [r(1, 3), r(3, 4)] {
                let q = complement(&p);
                let g = first_return_pgf(k, &p, 20);
                for i in 1..=20 {
                    let want = Q::from_bigint(&s_count(k, i)) * p.powu((k - 1) * i) * q.powu(i - 1);
                    assert_eq!(g.coeff(i), &want);
                }
            }
        }
    }

    #[test]
    fn pgf_matches_scaled_s_series() {
        let p = r(2, 5);
        let q = complement(&p);
        let via_s = s_series::<Q>(4, 15)
            .scale_argument(&(p.powu(3) * q.clone()))
            .scale(&(Q::one() / q));
        assert_eq!(via_s, first_return_pgf(4, &p, 15));
    }

    #[test]
    fn diagonal_examples() {
        let p = r(1, 3);
        let q = complement(&p);
        let f = diagonal_probabilities(3, &p, 4);
        assert!(f.coeff(0).is_one());
        assert_eq!(f.coeff(1), &p.powu(2));
        assert_eq!(f.coeff(2), &(p.powu(4) * (Q::one() + q * r(2, 1))));
        assert_eq!(diagonal_probability_closed(2, &p, 1), p);
    }

    #[test]
    fn reciprocal_identity() {
        for k in 2..=4 {
            let p = r(3, 7);
            let g = first_return_pgf(k, &p, 25);
            let one_minus_g = TruncatedSeries::one(25) - g;
            let f = diagonal_probabilities(k, &p, 25);
            assert_eq!(&one_minus_g * &f, TruncatedSeries::one(25));
            assert_eq!(one_minus_g.reciprocal().unwrap(), f);
        }
    }

    #[test]
    fn reciprocal_requires_unit() {
        let s = s_series::<Q>(2, 4);
        assert_eq!(s.reciprocal(), Err(Error::NonUnitConstant));
    }

    #[test]
    fn closed_form_matches_recursion_and_paths() {
        for k in 2..=5 {
            for p in [r(1, 4), r(1, 2), r(5, 6)] {
                let f = diagonal_probabilities(k, &p, 25);
                for n in 1..=25 {
                    let closed = diagonal_probability_closed(k, &p, n);
                    assert_eq!(&closed, f.coeff(n), "k={k} n={n}");
                    assert_eq!(diagonal_probability_from_paths(k, &p, n), closed);
                    assert!(closed > Q::zero() && closed <= Q::one());
                }
            }
        }
    }

    #[test]
    fn closed_form_s_agrees_with_series() {
        assert_eq!(closed_form_s(2, 0.0).unwrap(), 0.0);
        assert!(closed_form_check(2, 0.2, 200).unwrap() < 1e-10);
        assert!(closed_form_check(3, 0.1, 60).unwrap() < 1e-10);
        assert!(matches!(closed_form_s(2, 0.25), Err(Error::Domain { .. })));
        assert!(matches!(closed_form_s(3, -0.1), Err(Error::Domain { .. })));
        assert!(closed_form_s(4, 0.01).is_err());
    }

    #[test]
    fn float_pgf_stays_finite_for_large_orders() {
        let g = first_return_pgf(3, &0.5f64, 3000);
        assert!(g.coeffs().iter().all(|c| c.is_finite()));
        // at p = (k-1)/k the weights sum to 1 in the limit
        let f = diagonal_probabilities(3, &(2.0f64 / 3.0), 200);
        assert!(f.coeffs().iter().all(|&c| c > 0.0 && c <= 1.0));
    }

    #[test]
    fn csv_export() {
        let s = s_series::<Q>(2, 3);
        assert_eq!(s.to_csv(), "n,coefficient\n0,0\n1,1\n2,1\n3,2\n");
        let g = first_return_pgf(2, &r(1, 2), 2);
        assert_eq!(g.to_csv(), "n,coefficient\n0,0\n1,1/2\n2,1/8\n");
        let f = diagonal_probabilities(2, &0.5f64, 1);
        assert_eq!(f.to_csv(), "n,coefficient\n0,1\n1,0.5\n");
    }

    proptest! {
        #[test]
        fn scale_argument_composes(a in 1i64..5, b in 1i64..5, k in 2usize..5) {
            let s = s_series::<Q>(k, 10);
            let ab = r(a, 7) * r(b, 3);
            prop_assert_eq!(
                s.scale_argument(&r(a, 7)).scale_argument(&r(b, 3)),
                s.scale_argument(&ab)
            );
        }

        #[test]
        fn product_with_reciprocal_is_one(c in proptest::collection::vec(-5i64..5, 1..12)) {
            let mut coeffs: Vec<Q> = c.iter().map(|&x| r(x, 1)).collect();
            coeffs[0] = Q::one();
            let s = TruncatedSeries::new(coeffs);
            let inv = s.reciprocal().unwrap();
            prop_assert_eq!(&s * &inv, TruncatedSeries::one(s.order()));
        }
    }
}
