//! Exact scalar types.
//!
//! Everything in this crate is generic over [`Scalar`], an ordered field with
//! exact arithmetic. The blanket implementation covers `Ratio<T>` for any signed
//! integer `T`, so `BigRational` (the default, see [`crate::Rational`]),
//! `Rational64` and `Ratio<i128>` all work. Floating point types are excluded on
//! purpose: every identity checked here is an exact equality.

use std::fmt::{self, Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed};

use crate::error::{Error, Result};

pub trait Scalar:
    Clone + Ord + Hash + Debug + Display + FromStr + Num + Signed + Send + Sync + 'static
{
    fn from_i64(n: i64) -> Self;

    fn ratio(n: i64, d: i64) -> Self {
        Self::from_i64(n) / Self::from_i64(d)
    }

    fn two() -> Self {
        Self::from_i64(2)
    }

    fn floor(&self) -> Self;

    fn ceil(&self) -> Self;

    fn is_integer(&self) -> bool;

    /// Decimal rendering truncated toward zero after `digits` fractional digits.
    fn to_decimal(&self, digits: usize) -> String;

    /// `2^-k`.
    fn pow2_inv(k: u32) -> Self {
        let mut out = Self::one();
        let half = Self::ratio(1, 2);
        for _ in 0..k {
            out = out * half.clone();
        }
        out
    }

    fn midpoint(a: &Self, b: &Self) -> Self {
        (a.clone() + b.clone()) / Self::two()
    }

    fn parse(s: &str) -> Result<Self> {
        s.trim()
            .parse::<Self>()
            .map_err(|_| Error::Parse(format!("not a rational: {s:?}")))
    }
}

impl<T> Scalar for Ratio<T>
where
    T: Clone + Integer + Signed + Hash + Debug + Display + FromStr + FromPrimitive + Send + Sync + 'static,
{
    fn from_i64(n: i64) -> Self {
        Ratio::from_integer(T::from_i64(n).expect("integer fits the scalar type"))
    }

    fn floor(&self) -> Self {
        Ratio::floor(self)
    }

    fn ceil(&self) -> Self {
        Ratio::ceil(self)
    }

    fn is_integer(&self) -> bool {
        Ratio::is_integer(self)
    }

    fn to_decimal(&self, digits: usize) -> String {
        let neg = self.is_negative();
        let abs = self.abs();
        let whole = abs.trunc().to_integer();
        let mut frac = abs.fract();
        let ten = T::from_i64(10).expect("10 fits");
        let mut out = String::new();
        if neg {
            out.push('-');
        }
        out.push_str(&whole.to_string());
        if digits > 0 {
            out.push('.');
            for _ in 0..digits {
                frac = frac * Ratio::from_integer(ten.clone());
                let d = frac.trunc().to_integer();
                out.push_str(&d.to_string());
                frac = frac.fract();
            }
        }
        out
    }
}

/// A scalar extended by two infinities.
///
/// The derived order places `NegInf` below every finite value and `PosInf`
/// above, which is exactly the order needed for interval endpoints.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Extended<S> {
    NegInf,
    Finite(S),
    PosInf,
}

impl<S: Scalar> Extended<S> {
    pub fn finite(&self) -> Option<&S> {
        match self {
            Extended::Finite(v) => Some(v),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Extended::Finite(_))
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "-inf" => Ok(Extended::NegInf),
            "inf" | "+inf" => Ok(Extended::PosInf),
            other => S::parse(other).map(Extended::Finite),
        }
    }
}

impl<S: Scalar> From<S> for Extended<S> {
    fn from(v: S) -> Self {
        Extended::Finite(v)
    }
}

impl<S: Display> Display for Extended<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::NegInf => f.write_str("-inf"),
            Extended::Finite(v) => write!(f, "{v}"),
            Extended::PosInf => f.write_str("inf"),
        }
    }
}

/// Shorthand for `p/q` in tests and examples.
pub fn q<S: Scalar>(n: i64, d: i64) -> S {
    S::ratio(n, d)
}

/// Shorthand for a finite extended value.
pub fn qx<S: Scalar>(n: i64, d: i64) -> Extended<S> {
    Extended::Finite(S::ratio(n, d))
}
