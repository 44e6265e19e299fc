//! Arbitrary-precision rationals kept in lowest terms.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::LinalgError;

/// Exact rational number.
///
/// The denominator is always positive and coprime to the numerator, and zero
/// is stored as `0/1`. Every constructor and arithmetic result is reduced, so
/// `==` is structural equality of values.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rational {
    num: BigInt,
    den: BigInt,
}

impl Rational {
    /// Builds a reduced fraction, failing on a zero denominator.
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self, LinalgError> {
        let den = den.into();
        if den.is_zero() {
            return Err(LinalgError::ZeroDenominator);
        }
        Ok(Self::reduced(num.into(), den))
    }

    pub fn from_integer(n: impl Into<BigInt>) -> Self {
        Self {
            num: n.into(),
            den: BigInt::one(),
        }
    }

    pub fn zero() -> Self {
        Self::from_integer(0)
    }

    pub fn one() -> Self {
        Self::from_integer(1)
    }

    // Caller guarantees den != 0.
    fn reduced(mut num: BigInt, mut den: BigInt) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        let g = num.gcd(&den);
        if !g.is_one() {
            num /= &g;
            den /= &g;
        }
        Self { num, den }
    }

    pub fn numer(&self) -> &BigInt {
        &self.num
    }

    /// Always positive.
    pub fn denom(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.den.is_one()
    }

    /// The value as an integer, if the denominator is 1.
    pub fn to_integer(&self) -> Option<&BigInt> {
        self.is_integer().then_some(&self.num)
    }

    pub fn abs(&self) -> Self {
        Self {
            num: self.num.abs(),
            den: self.den.clone(),
        }
    }

    /// Nearest `f64`, used only by the numerical analysis code.
    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        match (self.num.to_f64(), self.den.to_f64()) {
            (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
            _ => f64::NAN,
        }
    }

    /// Checked division.
    pub fn checked_div(&self, rhs: &Self) -> Result<Self, LinalgError> {
        if rhs.is_zero() {
            return Err(LinalgError::ZeroDenominator);
        }
        Ok(Self::reduced(&self.num * &rhs.den, &self.den * &rhs.num))
    }
}

impl Default for Rational {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Self::from_integer(n)
    }
}

impl From<u8> for Rational {
    fn from(n: u8) -> Self {
        Self::from_integer(n)
    }
}

impl From<BigInt> for Rational {
    fn from(n: BigInt) -> Self {
        Self::from_integer(n)
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        (&self.num * &other.den).cmp(&(&other.num * &self.den))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

fn is_decimal(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) && (s == "0" || !s.starts_with('0'))
}

/// Parses only the canonical form written by `Display`: `-?digits` or
/// `-?digits/digits`, in lowest terms, with no leading zeros, no `+`, no
/// `-0` and no explicit `/1`.
impl FromStr for Rational {
    type Err = LinalgError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LinalgError::Parse(s.to_string());
        let (num_str, den_str) = match s.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (s, None),
        };
        let digits = num_str.strip_prefix('-').unwrap_or(num_str);
        if !is_decimal(digits) || num_str == "-0" {
            return Err(bad());
        }
        let num: BigInt = num_str.parse().map_err(|_| bad())?;
        let Some(den_str) = den_str else {
            return Ok(Self::from_integer(num));
        };
        if den_str == "0" {
            return Err(LinalgError::ZeroDenominator);
        }
        if !is_decimal(den_str) {
            return Err(bad());
        }
        let den: BigInt = den_str.parse().map_err(|_| bad())?;
        let r = Self::reduced(num.clone(), den.clone());
        if den.is_one() || r.num != num || r.den != den {
            return Err(LinalgError::NotCanonical(s.to_string()));
        }
        Ok(r)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait<&Rational> for &Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                let f: fn(&Rational, &Rational) -> Rational = $body;
                f(self, rhs)
            }
        }
        impl $trait<Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: Rational) -> Rational {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Rational> for Rational {
            type Output = Rational;
            fn $method(self, rhs: &Rational) -> Rational {
                (&self).$method(rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a, b| {
    if a.den == b.den {
        Rational::reduced(&a.num + &b.num, a.den.clone())
    } else {
        Rational::reduced(&a.num * &b.den + &b.num * &a.den, &a.den * &b.den)
    }
});

forward_binop!(Sub, sub, |a, b| {
    if a.den == b.den {
        Rational::reduced(&a.num - &b.num, a.den.clone())
    } else {
        Rational::reduced(&a.num * &b.den - &b.num * &a.den, &a.den * &b.den)
    }
});

forward_binop!(Mul, mul, |a, b| Rational::reduced(
    &a.num * &b.num,
    &a.den * &b.den
));

// Panics on division by zero, like the integer operators. Use `checked_div`
// when the divisor is untrusted.
forward_binop!(Div, div, |a, b| a
    .checked_div(b)
    .expect("rational division by zero"));

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational {
            num: -self.num,
            den: self.den,
        }
    }
}

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        -(self.clone())
    }
}

impl std::iter::Sum for Rational {
    fn sum<I: Iterator<Item = Rational>>(iter: I) -> Self {
        iter.fold(Rational::zero(), |acc, x| acc + x)
    }
}

/// Exact `Σ a_i·b_i`, summed over a common denominator and reduced once.
pub(super) fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    let mut den = BigInt::one();
    let mut num = BigInt::zero();
    for (x, y) in a.iter().zip(b) {
        if x.is_zero() || y.is_zero() {
            continue;
        }
        let q = &x.den * &y.den;
        let p = &x.num * &y.num;
        if q.is_one() {
            num += p * &den;
            continue;
        }
        let g = den.gcd(&q);
        // Lift the running sum to lcm(den, q).
        let lift = &q / &g;
        if !lift.is_one() {
            num *= &lift;
            den *= &lift;
        }
        num += p * (&den / &q);
    }
    Rational::reduced(num, den)
}

/// Shorthand constructor, `rat(3, -6)` is `-1/2`.
pub fn rat(num: i64, den: i64) -> Result<Rational, LinalgError> {
    Rational::new(num, den)
}
