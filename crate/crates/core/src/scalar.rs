//! Scalar abstraction shared by every algorithm in the crate.
//!
//! Two concrete scalars are provided: [`Rational`] (arbitrary precision,
//! the reference semantics) and `f64`. [`Surd`] adjoins a single square root
//! to either of them; it is what parameter lifts live in when `v = v₀²` is
//! not a perfect square over the rationals.

use std::cmp::Ordering;
use std::fmt::{self, Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

/// Exact arbitrary-precision rational number.
pub type Rational = BigRational;

/// Field-like numeric type with ordering, optional square roots and a JSON
/// rendering.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// `true` when arithmetic is exact and equality is literal.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_int(n: i64) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    /// Exact value of a finite double (`None` for NaN or infinities).
    fn from_f64(x: f64) -> Option<Self>;
    fn to_f64(&self) -> f64;

    /// Square root within the same scalar type. Exact scalars return `None`
    /// for non-squares; every scalar returns `None` for negative input.
    fn sqrt(&self) -> Option<Self>;

    /// Parses `"3/4"`, `"-2"`, `"0.125"` or `"1e-3"`.
    fn parse_str(s: &str) -> Result<Self>;

    /// JSON rendering: `"p/q"` strings for exact scalars, numbers for floats.
    fn to_json(&self) -> Value;

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn half() -> Self {
        Self::from_ratio(1, 2)
    }

    fn powi(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc * self.clone();
        }
        acc
    }

    fn from_json(value: &Value) -> Result<Self> {
        match value {
            Value::String(s) => Self::parse_str(s),
            Value::Number(n) => Self::parse_str(&n.to_string()),
            other => Err(Error::Parse(format!("expected a scalar, found {other}"))),
        }
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }

    fn one() -> Self {
        One::one()
    }

    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x)
    }

    fn to_f64(&self) -> f64 {
        match ToPrimitive::to_f64(self) {
            Some(x) if x.is_finite() => x,
            // Fall back to a ratio of separately converted parts.
            _ => self.numer().to_f64().unwrap_or(f64::NAN) / self.denom().to_f64().unwrap_or(f64::NAN),
        }
    }

    fn sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = self.numer().sqrt();
        let d = self.denom().sqrt();
        if &n * &n == *self.numer() && &d * &d == *self.denom() {
            Some(BigRational::new(n, d))
        } else {
            None
        }
    }

    fn parse_str(s: &str) -> Result<Self> {
        parse_rational(s)
    }

    fn to_json(&self) -> Value {
        Value::String(self.to_string())
    }

    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }

    fn one() -> Self {
        1.0
    }

    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_f64(x: f64) -> Option<Self> {
        x.is_finite().then_some(x)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn sqrt(&self) -> Option<Self> {
        (*self >= 0.0).then(|| f64::sqrt(*self))
    }

    fn parse_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: f64 = n.trim().parse().map_err(|_| Error::Parse(format!("bad number {s:?}")))?;
            let d: f64 = d.trim().parse().map_err(|_| Error::Parse(format!("bad number {s:?}")))?;
            return Ok(n / d);
        }
        s.parse().map_err(|_| Error::Parse(format!("bad number {s:?}")))
    }

    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self)
            .map(Value::Number)
            .unwrap_or_else(|| Value::String(self.to_string()))
    }
}

/// Parses integers, `p/q` fractions and decimal literals exactly.
fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("bad rational {s:?}"));
    if s.contains('/') {
        return BigRational::from_str(s).map_err(|_| bad());
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all: String = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str(if all.is_empty() { "0" } else { &all }).map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = BigRational::from_integer(numer);
    if scale >= 0 {
        value *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if negative { -value } else { value })
}

/// Numeric tolerances used by float-mode comparisons. Exact scalars ignore
/// them and compare literally.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    /// Relative tolerance for equality checks.
    pub equality: f64,
    /// Relative threshold below which a recovery denominator counts as zero.
    pub guard: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self { equality: 1e-9, guard: 1e-8 }
    }
}

impl Tolerance {
    pub fn new(equality: f64, guard: f64) -> Result<Self> {
        if !(equality > 0.0 && guard > 0.0) {
            return Err(Error::Config("tolerances must be positive".into()));
        }
        Ok(Self { equality, guard })
    }

    /// `x == y`, or within `equality · max(1, |x|, |y|)` for floats.
    pub fn eq<S: Scalar>(&self, x: &S, y: &S) -> bool {
        if S::EXACT {
            return x == y;
        }
        let (x, y) = (x.to_f64(), y.to_f64());
        (x - y).abs() <= self.equality * 1f64.max(x.abs()).max(y.abs())
    }

    /// Zero test for a value relative to the magnitude `scale` of the terms
    /// it was computed from.
    pub fn vanishes<S: Scalar>(&self, x: &S, scale: f64) -> bool {
        if S::EXACT {
            return x.is_zero();
        }
        x.to_f64().abs() <= self.equality * scale.abs().max(1.0)
    }

    /// Guard test for a recovery denominator: `|den| ≤ guard · (1 + |num|)`.
    pub fn guard_vanishes<S: Scalar>(&self, den: &S, num: &S) -> bool {
        if S::EXACT {
            return den.is_zero();
        }
        den.to_f64().abs() <= self.guard * (1.0 + num.to_f64().abs())
    }

    /// Sign test with a dead zone of width `equality` around zero.
    pub fn is_negative<S: Scalar>(&self, x: &S) -> bool {
        if S::EXACT {
            return *x < S::zero();
        }
        x.to_f64() < -self.equality
    }

    /// `x ∈ [0, 1]`, widened by `equality` for floats.
    pub fn in_unit_interval<S: Scalar>(&self, x: &S) -> bool {
        if S::EXACT {
            return *x >= S::zero() && *x <= S::one();
        }
        let x = x.to_f64();
        x >= -self.equality && x <= 1.0 + self.equality
    }
}

/// An element `rational + radical·√radicand` of a real quadratic extension.
///
/// Operands must share the radicand unless one of them has a zero radical
/// part. [`Surd::sqrt_of`] never produces a radical part when the square
/// root exists in the base scalar, so the extension is a field whenever a
/// radical part is present.
#[derive(Clone)]
pub struct Surd<S> {
    rational: S,
    radical: S,
    radicand: S,
}

impl<S: Scalar> Surd<S> {
    pub fn from_base(x: S) -> Self {
        Self { rational: x, radical: S::zero(), radicand: S::zero() }
    }

    /// `√d`, kept symbolic when `d` has no square root in `S`.
    pub fn sqrt_of(d: S) -> Self {
        match d.sqrt() {
            Some(r) => Self::from_base(r),
            None => Self { rational: S::zero(), radical: S::one(), radicand: d },
        }
    }

    pub fn rational_part(&self) -> &S {
        &self.rational
    }

    pub fn radical_part(&self) -> &S {
        &self.radical
    }

    pub fn radicand(&self) -> &S {
        &self.radicand
    }

    /// The value as a base scalar, if the radical part vanishes.
    pub fn to_base(&self) -> Option<S> {
        self.radical.is_zero().then(|| self.rational.clone())
    }

    fn normalized(mut self) -> Self {
        if self.radical.is_zero() {
            self.radicand = S::zero();
        }
        self
    }

    fn shared_radicand(&self, other: &Self) -> S {
        if self.radical.is_zero() {
            other.radicand.clone()
        } else {
            debug_assert!(
                other.radical.is_zero() || self.radicand == other.radicand,
                "mixing distinct quadratic extensions"
            );
            self.radicand.clone()
        }
    }

    fn conjugate(&self) -> Self {
        Self { rational: self.rational.clone(), radical: -self.radical.clone(), radicand: self.radicand.clone() }
    }

    /// Sign in the real embedding (radicand assumed non-negative).
    fn sign(&self) -> Ordering {
        let zero = S::zero();
        let sa = self.rational.partial_cmp(&zero).unwrap_or(Ordering::Equal);
        let sb = self.radical.partial_cmp(&zero).unwrap_or(Ordering::Equal);
        match (sa, sb) {
            (s, Ordering::Equal) => s,
            (Ordering::Equal, s) => s,
            (x, y) if x == y => x,
            (x, y) => {
                let a2 = self.rational.clone() * self.rational.clone();
                let b2d = self.radical.clone() * self.radical.clone() * self.radicand.clone();
                match a2.partial_cmp(&b2d).unwrap_or(Ordering::Equal) {
                    Ordering::Greater => x,
                    Ordering::Less => y,
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }
}

impl<S: Scalar> Debug for Surd<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Display::fmt(self, f)
    }
}

impl<S: Scalar> Display for Surd<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.radical.is_zero() {
            write!(f, "{}", self.rational)
        } else {
            write!(f, "{}+{}*sqrt({})", self.rational, self.radical, self.radicand)
        }
    }
}

impl<S: Scalar> PartialEq for Surd<S> {
    fn eq(&self, other: &Self) -> bool {
        self.rational == other.rational
            && self.radical == other.radical
            && (self.radical.is_zero() || self.radicand == other.radicand)
    }
}

impl<S: Scalar> PartialOrd for Surd<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some((self.clone() - other.clone()).sign())
    }
}

impl<S: Scalar> Add for Surd<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let d = self.shared_radicand(&rhs);
        Self { rational: self.rational + rhs.rational, radical: self.radical + rhs.radical, radicand: d }
            .normalized()
    }
}

impl<S: Scalar> Sub for Surd<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

impl<S: Scalar> Neg for Surd<S> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { rational: -self.rational, radical: -self.radical, radicand: self.radicand }
    }
}

impl<S: Scalar> Mul for Surd<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.radical.is_zero() && rhs.radical.is_zero() {
            return Self::from_base(self.rational * rhs.rational);
        }
        let d = self.shared_radicand(&rhs);
        let rational = self.rational.clone() * rhs.rational.clone()
            + self.radical.clone() * rhs.radical.clone() * d.clone();
        let radical = self.rational * rhs.radical + self.radical * rhs.rational;
        Self { rational, radical, radicand: d }.normalized()
    }
}

impl<S: Scalar> Div for Surd<S> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        if rhs.radical.is_zero() {
            let r = rhs.rational;
            return Self {
                rational: self.rational / r.clone(),
                radical: self.radical / r,
                radicand: self.radicand,
            }
            .normalized();
        }
        let norm = rhs.rational.clone() * rhs.rational.clone()
            - rhs.radical.clone() * rhs.radical.clone() * rhs.radicand.clone();
        let num = self * rhs.conjugate();
        Self { rational: num.rational / norm.clone(), radical: num.radical / norm, radicand: num.radicand }
            .normalized()
    }
}

impl<S: Scalar> Scalar for Surd<S> {
    const EXACT: bool = S::EXACT;

    fn zero() -> Self {
        Self::from_base(S::zero())
    }

    fn one() -> Self {
        Self::from_base(S::one())
    }

    fn from_int(n: i64) -> Self {
        Self::from_base(S::from_int(n))
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Self::from_base(S::from_ratio(num, den))
    }

    fn from_f64(x: f64) -> Option<Self> {
        S::from_f64(x).map(Self::from_base)
    }

    fn to_f64(&self) -> f64 {
        if self.radical.is_zero() {
            self.rational.to_f64()
        } else {
            self.rational.to_f64() + self.radical.to_f64() * self.radicand.to_f64().sqrt()
        }
    }

    fn sqrt(&self) -> Option<Self> {
        self.to_base().and_then(|x| x.sqrt()).map(Self::from_base)
    }

    fn parse_str(s: &str) -> Result<Self> {
        S::parse_str(s).map(Self::from_base)
    }

    fn to_json(&self) -> Value {
        match self.to_base() {
            Some(x) => x.to_json(),
            None => Value::String(self.to_string()),
        }
    }

    fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.radical.is_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::{Rational, Scalar, Surd, Tolerance, Value};

    fn q(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn parses_fractions_and_decimals_exactly() {
        assert_eq!(Rational::parse_str("3/4").unwrap(), q(3, 4));
        assert_eq!(Rational::parse_str("0.125").unwrap(), q(1, 8));
        assert_eq!(Rational::parse_str("-2").unwrap(), q(-2, 1));
        assert_eq!(Rational::parse_str("1.5e-1").unwrap(), q(3, 20));
        assert_eq!(Rational::parse_str(".5").unwrap(), q(1, 2));
        assert!(Rational::parse_str("abc").is_err());
        assert!(Rational::parse_str("1/0").is_err());
        assert_eq!(f64::parse_str("3/4").unwrap(), 0.75);
    }

    #[test]
    fn rational_sqrt_only_for_perfect_squares() {
        assert_eq!(q(9, 16).sqrt(), Some(q(3, 4)));
        assert_eq!(q(2, 1).sqrt(), None);
        assert_eq!(q(-1, 4).sqrt(), None);
        assert_eq!(Rational::zero().sqrt(), Some(Rational::zero()));
    }

    #[test]
    fn surd_arithmetic_in_q_sqrt2() {
        let r2 = Surd::sqrt_of(q(2, 1));
        assert!(!r2.radical_part().is_zero());
        let two = r2.clone() * r2.clone();
        assert_eq!(two.to_base(), Some(q(2, 1)));
        let x = Surd::from_base(q(1, 1)) + r2.clone();
        let inv = Surd::one() / x.clone();
        assert_eq!((inv * x).to_base(), Some(q(1, 1)));
        // 1 - sqrt(2) < 0 < 3/2 - sqrt(2)
        assert!(Surd::from_base(q(1, 1)) - r2.clone() < Surd::zero());
        assert!(Surd::from_base(q(3, 2)) - r2.clone() > Surd::zero());
        assert!(r2 > Surd::from_base(q(7, 5)));
    }

    #[test]
    fn surd_of_square_collapses() {
        let s = Surd::sqrt_of(q(1, 16));
        assert_eq!(s.to_base(), Some(q(1, 4)));
        assert_eq!(s.to_json(), Value::String("1/4".into()));
    }

    #[test]
    fn tolerance_modes() {
        let tol = Tolerance::default();
        assert!(tol.eq(&1.0, &(1.0 + 1e-12)));
        assert!(!tol.eq(&q(1, 3), &q(333_333_333, 1_000_000_000)));
        assert!(tol.guard_vanishes(&1e-10, &0.5));
        assert!(!tol.guard_vanishes(&1e-6, &0.5));
        assert!(tol.in_unit_interval(&(-1e-12)));
        assert!(!tol.in_unit_interval(&q(-1, 1_000_000_000_000)));
        assert!(Tolerance::new(0.0, 1.0).is_err());
    }
}
