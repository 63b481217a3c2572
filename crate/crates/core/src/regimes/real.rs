use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

/// Tolerance for comparisons once a value has left exact arithmetic.
pub const FLOAT_TOLERANCE: f64 = 1e-12;

/// A real number that stays an exact rational for as long as its inputs allow.
///
/// Values parsed from decimal or fraction strings are exact; values built from
/// `f64` are approximate, and any operation touching an approximate value (or
/// overflowing `i128`) falls back to `f64`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Real {
    Exact(Rational),
    Approx(f64),
    /// `+inf`, only meaningful as a Lebesgue exponent.
    Infinity,
}

impl Real {
    pub fn int(n: i64) -> Self {
        Real::Exact(Rational::from_integer(n as i128))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Real::Exact(Rational::new(n as i128, d as i128))
    }

    pub fn approx(x: f64) -> Self {
        if x == f64::INFINITY {
            Real::Infinity
        } else {
            Real::Approx(x)
        }
    }

    /// Parses integers, decimals (`-0.25`, `1e-3`), fractions (`1/3`) and `inf`.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if matches!(s, "inf" | "+inf" | "infinity" | "∞") {
            return Ok(Real::Infinity);
        }
        if let Some((a, b)) = s.split_once('/') {
            let (a, b) = (Self::parse(a)?, Self::parse(b)?);
            if b.is_zero() {
                return Err(Error::InvalidArgument(format!("division by zero in '{s}'")));
            }
            return Ok(a / b);
        }
        match parse_decimal(s) {
            Some(r) => Ok(Real::Exact(r)),
            None => s
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .map(Real::Approx)
                .ok_or_else(|| Error::InvalidArgument(format!("not a number: '{s}'"))),
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Real::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Real::Approx(x) => x,
            Real::Infinity => f64::INFINITY,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Real::Exact(_))
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Real::Infinity)
    }

    pub fn is_zero(self) -> bool {
        self.cmp_tol(Real::int(0)) == Ordering::Equal
    }

    /// `1 / self`, with `1 / inf = 0` exactly.
    pub fn recip(self) -> Self {
        match self {
            Real::Infinity => Real::int(0),
            other => Real::int(1) / other,
        }
    }

    /// Total order; exact when both sides are exact, otherwise within [`FLOAT_TOLERANCE`].
    pub fn cmp_tol(self, other: Real) -> Ordering {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => a.cmp(&b),
            (Real::Infinity, Real::Infinity) => Ordering::Equal,
            (Real::Infinity, _) => Ordering::Greater,
            (_, Real::Infinity) => Ordering::Less,
            (a, b) => {
                let (x, y) = (a.to_f64(), b.to_f64());
                let scale = 1.0_f64.max(x.abs()).max(y.abs());
                if (x - y).abs() <= FLOAT_TOLERANCE * scale {
                    Ordering::Equal
                } else {
                    x.total_cmp(&y)
                }
            }
        }
    }

    pub fn eq_tol(self, other: Real) -> bool {
        self.cmp_tol(other) == Ordering::Equal
    }

    pub fn lt(self, other: Real) -> bool {
        self.cmp_tol(other) == Ordering::Less
    }

    pub fn le(self, other: Real) -> bool {
        self.cmp_tol(other) != Ordering::Greater
    }

    pub fn gt(self, other: Real) -> bool {
        self.cmp_tol(other) == Ordering::Greater
    }

    pub fn ge(self, other: Real) -> bool {
        self.cmp_tol(other) != Ordering::Less
    }

    /// Nearest integer when `self` is one (exactly, or within tolerance).
    pub fn as_integer(self) -> Option<i128> {
        match self {
            Real::Exact(r) => r.is_integer().then(|| r.to_integer()),
            Real::Approx(x) => {
                let n = x.round();
                ((x - n).abs() <= FLOAT_TOLERANCE * x.abs().max(1.0)).then_some(n as i128)
            }
            Real::Infinity => None,
        }
    }

    pub fn is_odd_integer(self) -> bool {
        self.as_integer().is_some_and(|n| n.rem_euclid(2) == 1)
    }

    /// Smallest integer `>= self`; values within tolerance of an integer round to it.
    pub fn ceil(self) -> i128 {
        match self {
            Real::Exact(r) => r.ceil().to_integer(),
            _ => match self.as_integer() {
                Some(n) => n,
                None => self.to_f64().ceil() as i128,
            },
        }
    }

    pub fn floor(self) -> i128 {
        match self {
            Real::Exact(r) => r.floor().to_integer(),
            _ => match self.as_integer() {
                Some(n) => n,
                None => self.to_f64().floor() as i128,
            },
        }
    }

    fn combine(
        self,
        rhs: Real,
        exact: impl Fn(&Rational, &Rational) -> Option<Rational>,
        float: impl Fn(f64, f64) -> f64,
    ) -> Real {
        match (self, rhs) {
            (Real::Exact(a), Real::Exact(b)) => match exact(&a, &b) {
                Some(r) => Real::Exact(r),
                None => Real::approx(float(self.to_f64(), rhs.to_f64())),
            },
            _ => Real::approx(float(self.to_f64(), rhs.to_f64())),
        }
    }
}

fn parse_decimal(s: &str) -> Option<Rational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: String = format!("{int}{frac}");
    let all = all.trim_start_matches('0');
    if all.len() > 30 {
        return None;
    }
    let mut value: i128 = if all.is_empty() { 0 } else { all.parse().ok()? };
    if neg {
        value = -value;
    }
    let scale = exp - frac.len() as i32;
    if scale.unsigned_abs() > 30 {
        return None;
    }
    let pow = 10_i128.checked_pow(scale.unsigned_abs())?;
    if scale >= 0 {
        Some(Rational::from_integer(value.checked_mul(pow)?))
    } else {
        Some(Rational::new(value, pow))
    }
}

impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Real::approx(x)
    }
}

impl From<i64> for Real {
    fn from(n: i64) -> Self {
        Real::int(n)
    }
}

impl Add for Real {
    type Output = Real;
    fn add(self, rhs: Real) -> Real {
        self.combine(rhs, |a, b| a.checked_add(b), |x, y| x + y)
    }
}

impl Sub for Real {
    type Output = Real;
    fn sub(self, rhs: Real) -> Real {
        self.combine(rhs, |a, b| a.checked_sub(b), |x, y| x - y)
    }
}

impl Mul for Real {
    type Output = Real;
    fn mul(self, rhs: Real) -> Real {
        self.combine(rhs, |a, b| a.checked_mul(b), |x, y| x * y)
    }
}

impl Div for Real {
    type Output = Real;
    fn div(self, rhs: Real) -> Real {
        self.combine(
            rhs,
            |a, b| if b.is_zero() { None } else { a.checked_div(b) },
            |x, y| x / y,
        )
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        match self {
            Real::Exact(r) => Real::Exact(-r),
            Real::Approx(x) => Real::Approx(-x),
            Real::Infinity => Real::Approx(f64::NEG_INFINITY),
        }
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Exact(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Real::Exact(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Real::Approx(x) => write!(f, "{x}"),
            Real::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Real::Infinity => s.serialize_str("inf"),
            other => s.serialize_f64(other.to_f64()),
        }
    }
}

impl Real {
    pub fn abs(self) -> Real {
        match self {
            Real::Exact(r) => Real::Exact(r.abs()),
            Real::Approx(x) => Real::Approx(x.abs()),
            Real::Infinity => Real::Infinity,
        }
    }
}
