//! Scalar kernel shared by every other module.
//!
//! The numerical routines are generic over two traits:
//!
//! * [`Ring`]: commutative ring operations plus an embedding of the integers.
//!   Implemented for `f32`, `f64`, [`BigRational`] and for polynomials over
//!   any ring, which lets the pure recursions run symbolically in `p`.
//! * [`Field`]: a ring with division and an ordering. Implemented for `f32`,
//!   `f64` and [`BigRational`].
//!
//! [`Scalar`] is the tagged runtime value used at the API boundary, where the
//! evaluation mode is only known once a probability has been parsed.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{Float, FloatConst, One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Commutative ring with unit and an embedding of the integers.
pub trait Ring:
    Clone
    + fmt::Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_bigint(n: &BigInt) -> Self;

    fn from_u64(n: u64) -> Self {
        Self::from_bigint(&BigInt::from(n))
    }

    fn powu(&self, e: usize) -> Self {
        num_traits::pow(self.clone(), e)
    }
}

/// Ordered field. `EXACT` distinguishes rational arithmetic from floating point.
pub trait Field: Ring + Div<Output = Self> + PartialOrd {
    const EXACT: bool;

    fn from_rational(r: &BigRational) -> Self;

    fn to_f64(&self) -> f64;

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_rational(&BigRational::new(num.into(), den.into()))
    }
}

/// Floating-point fields, for the transcendental parts of the asymptotics.
pub trait RealField: Field + Float + FloatConst {}

impl<T: Field + Float + FloatConst> RealField for T {}

macro_rules! impl_float_scalar {
    ($($t:ty),*) => {
        $(
            impl Ring for $t {
                #[inline]
                fn from_bigint(n: &BigInt) -> Self {
                    n.to_f64().unwrap_or(f64::NAN) as $t
                }

                #[inline]
                fn from_u64(n: u64) -> Self {
                    n as $t
                }

                #[inline]
                fn powu(&self, e: usize) -> Self {
                    match i32::try_from(e) {
                        Ok(e) => self.powi(e),
                        Err(_) => num_traits::pow(*self, e),
                    }
                }
            }

            impl Field for $t {
                const EXACT: bool = false;

                #[inline]
                fn from_rational(r: &BigRational) -> Self {
                    ToPrimitive::to_f64(r).unwrap_or(f64::NAN) as $t
                }

                #[inline]
                fn to_f64(&self) -> f64 {
                    *self as f64
                }
            }
        )*
    };
}

impl_float_scalar!(f32, f64);

impl Ring for BigRational {
    fn from_bigint(n: &BigInt) -> Self {
        BigRational::from_integer(n.clone())
    }
}

impl Field for BigRational {
    const EXACT: bool = true;

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// `1 - p`.
#[inline]
pub fn complement<T: Ring>(p: &T) -> T {
    T::one() - p.clone()
}

/// Binomial coefficient C(n, k), zero outside `0 <= k <= n`.
pub fn binomial(n: u64, k: i64) -> BigInt {
    if k < 0 || k as u64 > n {
        return BigInt::zero();
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc = BigInt::one();
    for i in 0..k {
        // acc * (n - i) is always divisible by (i + 1) here.
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// A runtime-tagged scalar. Arithmetic never mixes the two modes.
#[derive(Debug, Clone, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => Field::to_f64(r),
            Scalar::Float(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    fn zip(
        &self,
        other: &Scalar,
        exact: impl FnOnce(&BigRational, &BigRational) -> BigRational,
        float: impl FnOnce(f64, f64) -> f64,
    ) -> Result<Scalar> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(exact(a, b))),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(float(*a, *b))),
            _ => Err(Error::ModeMismatch),
        }
    }

    pub fn checked_add(&self, other: &Scalar) -> Result<Scalar> {
        self.zip(other, |a, b| a + b, |a, b| a + b)
    }

    pub fn checked_sub(&self, other: &Scalar) -> Result<Scalar> {
        self.zip(other, |a, b| a - b, |a, b| a - b)
    }

    pub fn checked_mul(&self, other: &Scalar) -> Result<Scalar> {
        self.zip(other, |a, b| a * b, |a, b| a * b)
    }

    pub fn checked_div(&self, other: &Scalar) -> Result<Scalar> {
        if let Scalar::Exact(b) = other {
            if b.is_zero() {
                return Err(Error::InvalidArgument("division by zero".into()));
            }
        }
        self.zip(other, |a, b| a / b, |a, b| a / b)
    }
}

impl From<BigRational> for Scalar {
    fn from(r: BigRational) -> Self {
        Scalar::Exact(r)
    }
}

impl From<f64> for Scalar {
    fn from(x: f64) -> Self {
        Scalar::Float(x)
    }
}

impl From<f32> for Scalar {
    fn from(x: f32) -> Self {
        Scalar::Float(x as f64)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{r}"),
            Scalar::Float(x) => f.write_str(&format_float(*x)),
        }
    }
}

/// Renders a float with 15 significant digits, `.` as decimal separator and
/// trailing zeros removed. Very large or very small magnitudes use `e`
/// notation.
pub fn format_float(x: f64) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.14e}", x);
    let (mantissa, exp) = sci.split_once('e').expect("e notation");
    let exp: i32 = exp.parse().expect("exponent");
    if (-5..15).contains(&exp) {
        let decimals = (14 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" {
        "0".into()
    } else {
        t.to_string()
    }
}

/// A probability `p` in the open interval (0, 1); `q = 1 - p` is always derived.
#[derive(Debug, Clone, PartialEq)]
pub struct Probability {
    value: Scalar,
}

impl Probability {
    pub fn exact(value: BigRational) -> Result<Self> {
        if value <= BigRational::zero() || value >= BigRational::one() {
            return Err(Error::ProbabilityOutOfRange(value.to_string()));
        }
        Ok(Probability {
            value: Scalar::Exact(value),
        })
    }

    pub fn float(value: f64) -> Result<Self> {
        if !(value > 0.0 && value < 1.0) {
            return Err(Error::ProbabilityOutOfRange(format_float(value)));
        }
        Ok(Probability {
            value: Scalar::Float(value),
        })
    }

    pub fn value(&self) -> &Scalar {
        &self.value
    }

    pub fn q(&self) -> Scalar {
        match &self.value {
            Scalar::Exact(p) => Scalar::Exact(complement(p)),
            Scalar::Float(p) => Scalar::Float(1.0 - p),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.value.is_exact()
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    /// The same probability as a float (rounding an exact value).
    pub fn to_float(&self) -> Probability {
        Probability {
            value: Scalar::Float(self.to_f64()),
        }
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.value.fmt(f)
    }
}

/// Parses `"a/b"` or a decimal literal. With `float` unset the result is the
/// exact rational the text denotes (`"0.25"` is exactly 1/4); with `float`
/// set the value is read as a double.
pub fn parse_probability(text: &str, float: bool) -> Result<Probability> {
    let text = text.trim();
    if float {
        let value = if let Some((a, b)) = text.split_once('/') {
            let a: f64 = a.trim().parse().map_err(|_| malformed(text))?;
            let b: f64 = b.trim().parse().map_err(|_| malformed(text))?;
            a / b
        } else {
            text.parse::<f64>().map_err(|_| malformed(text))?
        };
        if !value.is_finite() {
            return Err(malformed(text));
        }
        return Probability::float(value);
    }
    Probability::exact(parse_rational(text)?)
}

/// Parses an exact rational from `"a/b"`, an integer, or a plain decimal.
pub fn parse_rational(text: &str) -> Result<BigRational> {
    let text = text.trim();
    if let Some((a, b)) = text.split_once('/') {
        let num = parse_integer(a.trim()).ok_or_else(|| malformed(text))?;
        let den = parse_integer(b.trim()).ok_or_else(|| malformed(text))?;
        if den.is_zero() {
            return Err(malformed(text));
        }
        return Ok(BigRational::new(num, den));
    }
    parse_decimal(text).ok_or_else(|| malformed(text))
}

fn malformed(text: &str) -> Error {
    Error::MalformedProbability(text.to_string())
}

fn parse_integer(text: &str) -> Option<BigInt> {
    let digits = text.strip_prefix(['+', '-']).unwrap_or(text);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    BigInt::from_str(text.trim_start_matches('+')).ok()
}

fn parse_decimal(text: &str) -> Option<BigRational> {
    let (negative, body) = match text.as_bytes().first()? {
        b'-' => (true, &text[1..]),
        b'+' => (false, &text[1..]),
        _ => (false, text),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    let all_digits = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(int_part) || !all_digits(frac_part) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut num = BigInt::from_str(&digits).ok()?;
    if negative {
        num = -num;
    }
    let den = num_traits::pow(BigInt::from(10u32), frac_part.len());
    Some(BigRational::new(num, den))
}

/// Sign of a rational, as -1, 0 or 1.
pub fn rational_sign(r: &BigRational) -> i32 {
    match r.numer().sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

/// Evaluates `$body` with `$p` bound to the concrete scalar inside a
/// [`Probability`], and wraps the result back into a [`Scalar`].
///
/// ```
/// use matchbox_core::{with_probability, numeric::{parse_probability, complement, Scalar}};
/// let p = parse_probability("1/4", false).unwrap();
/// let q = with_probability!(&p, |p| complement(p));
/// assert_eq!(q.to_string(), "3/4");
/// ```
#[macro_export]
macro_rules! with_probability {
    ($prob:expr, |$p:ident| $body:expr) => {
        match $prob.value() {
            $crate::numeric::Scalar::Exact($p) => $crate::numeric::Scalar::from($body),
            $crate::numeric::Scalar::Float($p) => $crate::numeric::Scalar::from($body),
        }
    };
}
