//! Regime classification and leading-order asymptotics of `M_n` and `R_n`.
//!
//! With `q = 1 - p` the process is supercritical for `q < 1/k` (bounded
//! residue), critical at `q = 1/k` (square-root growth) and subcritical for
//! `q > 1/k` (linear growth).

use std::fmt;

use crate::error::{Error, Result};
use crate::numeric::{complement, Field, RealField};
use crate::series::first_return_pgf;

/// Float inputs within this distance of `q = 1/k` count as critical.
pub const CRITICAL_TOLERANCE: f64 = 1e-12;

const BISECTION_STEPS: usize = 200;
const NEWTON_STEPS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Regime {
    Supercritical,
    Critical,
    Subcritical,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::Supercritical => "supercritical",
            Regime::Critical => "critical",
            Regime::Subcritical => "subcritical",
        })
    }
}

fn check_k(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("k must be at least 2, got {k}")));
    }
    Ok(())
}

/// Exact comparison for exact scalars, tolerance [`CRITICAL_TOLERANCE`]
/// for floats.
pub fn classify<T: Field>(k: usize, p: &T) -> Regime {
    let q = complement(p);
    let threshold = T::from_ratio(1, k as i64);
    if !T::EXACT && (q.to_f64() - threshold.to_f64()).abs() < CRITICAL_TOLERANCE {
        return Regime::Critical;
    }
    if q < threshold {
        Regime::Supercritical
    } else if q > threshold {
        Regime::Subcritical
    } else {
        Regime::Critical
    }
}

/// Radius of convergence `(k-1)^{k-1} / (k^k p^{k-1} q)` of the
/// first-return generating function.
pub fn r_star<T: Field>(k: usize, p: &T) -> T {
    let k1 = T::from_u64(k as u64 - 1);
    let kk = T::from_u64(k as u64);
    k1.powu(k - 1) / (kk.powu(k) * p.powu(k - 1) * complement(p))
}

/// Probability `lambda` that the walk ever returns to a diagonal state.
///
/// Equal to 1 unless subcritical; otherwise `s / q` where `s` is the root of
/// `s (1-s)^{k-1} = p^{k-1} q` in `[0, 1/k]`.
pub fn lambda<T: RealField>(k: usize, p: &T) -> Result<T> {
    check_k(k)?;
    if classify(k, p) != Regime::Subcritical {
        return Ok(T::one());
    }
    let q = complement(p);
    let target = p.powu(k - 1) * q;
    let g = |s: T| s * (T::one() - s).powu(k - 1) - target;
    let mut lo = T::zero();
    let mut hi = T::from_ratio(1, k as i64);
    if !(g(lo) < T::zero() && g(hi) > T::zero()) {
        return Err(Error::RootSolve(format!("no sign change for k={k}, p={}", Field::to_f64(p))));
    }
    for _ in 0..BISECTION_STEPS {
        let mid = (lo + hi) / T::from_u64(2);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut s = (lo + hi) / T::from_u64(2);
    for _ in 0..NEWTON_STEPS {
        // g'(s) = (1-s)^{k-2} (1 - k s)
        let slope = (T::one() - s).powu(k - 2) * (T::one() - T::from_u64(k as u64) * s);
        if slope <= T::zero() {
            break;
        }
        let next = s - g(s) / slope;
        if next < T::zero() || next > T::from_ratio(1, k as i64) {
            break;
        }
        s = next;
    }
    let value = s / q;
    if !(value > T::zero() && value < T::one()) {
        return Err(Error::RootSolve(format!("lambda out of range: {}", Field::to_f64(&value))));
    }
    Ok(value)
}

/// `d/dz S(p^{k-1} q z)` at `z = 1`.
pub fn s_derivative_at_1<T: RealField>(k: usize, p: &T) -> Result<T> {
    check_k(k)?;
    let q = complement(p);
    let kk = T::from_u64(k as u64);
    match classify(k, p) {
        Regime::Critical => Err(Error::CriticalRegime),
        Regime::Supercritical => Ok(*p * q / (T::one() - kk * q)),
        Regime::Subcritical => {
            let lam = lambda(k, p)?;
            let c = p.powu(k - 1) * q;
            let u = T::one() - q * lam;
            Ok(u * c / (u.powu(k) - T::from_u64(k as u64 - 1) * c))
        }
    }
}

/// `d^2/dz^2 S(p^{k-1} q z)` at `z = 1`; supercritical inputs only.
pub fn s_second_derivative_at_1<T: RealField>(k: usize, p: &T) -> Result<T> {
    check_k(k)?;
    match classify(k, p) {
        Regime::Critical => Err(Error::CriticalRegime),
        Regime::Subcritical => Err(Error::NotSupercritical),
        Regime::Supercritical => {
            let q = complement(p);
            let kk = T::from_u64(k as u64);
            let k1 = T::from_u64(k as u64 - 1);
            let two = T::from_u64(2);
            Ok(*p * q * q * k1 * (two - q * kk) / (T::one() - q * kk).powu(3))
        }
    }
}

/// Leading-order estimate of `M_n`.
pub fn residue_asymptotic<T: RealField>(k: usize, n: usize, p: &T) -> Result<T> {
    check_k(k)?;
    let q = complement(p);
    let kk = T::from_u64(k as u64);
    let k1 = T::from_u64(k as u64 - 1);
    let nn = T::from_u64(n as u64);
    Ok(match classify(k, p) {
        Regime::Supercritical => {
            let two = T::from_u64(2);
            k1 * (two - kk * q) / (two * (T::one() - kk * q))
        }
        Regime::Critical => (T::from_u64(2) * kk * k1 * nn / T::PI()).sqrt(),
        Regime::Subcritical => {
            let lam = lambda(k, p)?;
            (kk - T::one() / q) * nn + (*p / q) / (T::one() - lam)
        }
    })
}

/// Leading-order estimate of `R_n`.
pub fn first_return_asymptotic<T: RealField>(k: usize, n: usize, p: &T) -> Result<T> {
    check_k(k)?;
    let q = complement(p);
    let kk = T::from_u64(k as u64);
    let k1 = T::from_u64(k as u64 - 1);
    let nn = T::from_u64(n as u64);
    Ok(match classify(k, p) {
        Regime::Supercritical => *p / (T::one() - kk * q),
        Regime::Critical => (T::from_u64(8) * k1 * nn / (kk * T::PI())).sqrt(),
        Regime::Subcritical => {
            let lam = lambda(k, p)?;
            let u = T::one() - q * lam;
            let pk = p.powu(k - 1);
            nn * (T::one() - lam) + pk * u / (u.powu(k) - k1 * q * pk)
        }
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegimeReport<T> {
    pub k: usize,
    pub p: T,
    pub q: T,
    pub regime: Regime,
    /// Present only in the subcritical regime.
    pub lambda: Option<T>,
    pub r_star: T,
}

pub fn regime_report<T: RealField>(k: usize, p: &T) -> Result<RegimeReport<T>> {
    check_k(k)?;
    let regime = classify(k, p);
    let lambda = match regime {
        Regime::Subcritical => Some(lambda(k, p)?),
        _ => None,
    };
    Ok(RegimeReport {
        k,
        p: *p,
        q: complement(p),
        regime,
        lambda,
        r_star: r_star(k, p),
    })
}

/// `(1/q) sum_{i <= order} s_i (p^{k-1} q)^i`, the truncated return
/// probability.
pub fn truncated_return_probability(k: usize, p: f64, order: usize) -> f64 {
    first_return_pgf(k, &p, order).coeffs().iter().sum()
}

/// First and second derivatives of the truncated series of
/// `S(p^{k-1} q z)` at `z = 1` by Richardson-extrapolated central
/// differences.
pub fn finite_difference_derivatives(k: usize, p: f64, order: usize) -> (f64, f64) {
    let q = 1.0 - p;
    let h_series = first_return_pgf(k, &p, order).scale(&q);
    let f = |z: f64| h_series.evaluate(&z);
    let d1 = |h: f64| (f(1.0 + h) - f(1.0 - h)) / (2.0 * h);
    let d2 = |h: f64| (f(1.0 + h) - 2.0 * f(1.0) + f(1.0 - h)) / (h * h);
    let h = 1e-2;
    let first = (4.0 * d1(h / 2.0) - d1(h)) / 3.0;
    let second = (4.0 * d2(h / 2.0) - d2(h)) / 3.0;
    (first, second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn r_star_examples() {
        assert_eq!(r_star(2, &r(1, 2)), r(1, 1));
        assert_eq!(r_star(3, &r(1, 2)), r(32, 27));
        assert_eq!(r_star(3, &r(2, 3)), r(1, 1));
        assert!(r_star(3, &r(3, 4)) > r(1, 1));
    }

    #[test]
    fn classification() {
        assert_eq!(classify(3, &r(2, 3)), Regime::Critical);
        assert_eq!(classify(3, &r(3, 4)), Regime::Supercritical);
        assert_eq!(classify(3, &r(1, 2)), Regime::Subcritical);
        assert_eq!(classify(3, &(2.0f64 / 3.0)), Regime::Critical);
        assert_eq!(classify(2, &0.5f64), Regime::Critical);
        assert_eq!(classify(2, &0.75f64), Regime::Supercritical);
    }

    #[test]
    fn lambda_examples() {
        assert!((lambda(2, &0.25f64).unwrap() - 1.0 / 3.0).abs() < 1e-14);
        for k in 2..=5 {
            assert_eq!(lambda(k, &0.95f64).unwrap(), 1.0);
        }
        let direct = truncated_return_probability(3, 0.4, 400);
        assert!((lambda(3, &0.4f64).unwrap() - direct).abs() < 1e-10);
        assert!(lambda(1, &0.4f64).is_err());
    }

    #[test]
    fn lambda_approaches_one() {
        for k in 2..=5 {
            let critical_p = (k as f64 - 1.0) / k as f64;
            let mut last = 0.0;
            for step in 1..=40 {
                let q = 1.0 / k as f64 + 0.5 * (1.0 - 1.0 / k as f64) * (41 - step) as f64 / 41.0;
                let l = lambda(k, &(1.0 - q)).unwrap();
                assert!(l > 0.0 && l < 1.0);
                assert!(l > last, "lambda should increase as q falls");
                last = l;
            }
            let near = lambda(k, &(critical_p - 1e-6)).unwrap();
            assert!(1.0 - near < 1e-2);
        }
    }

    #[test]
    fn derivative_examples() {
        assert!((s_derivative_at_1(2, &0.75f64).unwrap() - 3.0 / 8.0).abs() < 1e-15);
        assert!((s_second_derivative_at_1(2, &0.75f64).unwrap() - 9.0 / 16.0).abs() < 1e-15);
        assert_eq!(s_derivative_at_1(2, &0.5f64), Err(Error::CriticalRegime));
        assert_eq!(s_second_derivative_at_1(2, &0.3f64), Err(Error::NotSupercritical));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for k in [2, 3] {
            for q in [0.1, 0.2] {
                let p = 1.0 - q;
                let (d1, d2) = finite_difference_derivatives(k, p, 500);
                assert!((d1 - s_derivative_at_1(k, &p).unwrap()).abs() < 1e-6);
                assert!((d2 - s_second_derivative_at_1(k, &p).unwrap()).abs() < 1e-6);
            }
        }
        // subcritical: derivative of the full series, which converges at z = 1
        let p = 0.4;
        let exact = s_derivative_at_1(3, &p).unwrap();
        let q = 1.0 - p;
        let series = first_return_pgf(3, &p, 2000).scale(&q).derivative();
        let direct: f64 = series.coeffs().iter().sum();
        assert!((direct - exact).abs() < 1e-9);
    }

    #[test]
    fn asymptotic_examples() {
        assert!((residue_asymptotic(2, 10, &0.75f64).unwrap() - 1.5).abs() < 1e-15);
        let crit = residue_asymptotic(3, 50, &(2.0f64 / 3.0)).unwrap();
        assert!((crit - (12.0 * 50.0 / std::f64::consts::PI).sqrt()).abs() < 1e-12);
        let a = residue_asymptotic(3, 10, &0.4f64).unwrap();
        let b = residue_asymptotic(3, 11, &0.4f64).unwrap();
        assert!((b - a - 4.0 / 3.0).abs() < 1e-12);
        assert!((first_return_asymptotic(2, 10, &0.75f64).unwrap() - 1.5).abs() < 1e-15);
        let crit = first_return_asymptotic(3, 50, &(2.0f64 / 3.0)).unwrap();
        assert!((crit - (16.0 * 50.0 / (3.0 * std::f64::consts::PI)).sqrt()).abs() < 1e-12);
        let a = first_return_asymptotic(2, 10, &0.25f64).unwrap();
        let b = first_return_asymptotic(2, 11, &0.25f64).unwrap();
        assert!((b - a - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn report_invariants() {
        for k in 2..=5 {
            for i in 1..20 {
                let p = i as f64 / 20.0;
                let rep = regime_report(k, &p).unwrap();
                assert_eq!(rep.lambda.is_some(), rep.regime == Regime::Subcritical);
                if let Some(l) = rep.lambda {
                    assert!(l > 0.0 && l < 1.0);
                }
                if rep.regime == Regime::Critical {
                    assert!((rep.r_star - 1.0).abs() < 1e-12);
                } else {
                    assert!(rep.r_star > 1.0);
                }
            }
        }
    }
}
