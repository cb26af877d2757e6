//! Exact rational weights.
//!
//! All solver-critical arithmetic (potentials, gains, charges, bounds) is done
//! in `BigRational`; floating point never enters a comparison that decides an
//! improvement or a guarantee.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Exact rational scalar used throughout the crate.
pub type Rat = BigRational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WeightError {
    #[error("weight must be strictly positive, got {0}")]
    NonPositive(String),
    #[error("cannot parse {0:?} as a rational (expected \"p/q\", an integer, or a decimal)")]
    Parse(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
}

/// A strictly positive exact rational weight.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Weight(Rat);

impl Weight {
    pub fn new(value: Rat) -> Result<Self, WeightError> {
        if value <= Rat::zero() {
            return Err(WeightError::NonPositive(format_fraction(&value)));
        }
        Ok(Weight(value))
    }

    pub fn from_int(n: i64) -> Result<Self, WeightError> {
        Self::new(Rat::from_integer(BigInt::from(n)))
    }

    pub fn one() -> Self {
        Weight(Rat::one())
    }

    pub fn rat(&self) -> &Rat {
        &self.0
    }

    pub fn into_rat(self) -> Rat {
        self.0
    }

    /// Squared weight, the potential contribution of a single vertex.
    pub fn sq(&self) -> Rat {
        &self.0 * &self.0
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_fraction(&self.0))
    }
}

impl FromStr for Weight {
    type Err = WeightError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Weight::new(parse_rational(s)?)
    }
}

impl Add<&Weight> for Weight {
    type Output = Weight;
    fn add(self, rhs: &Weight) -> Weight {
        Weight(self.0 + &rhs.0)
    }
}

impl AddAssign<&Weight> for Weight {
    fn add_assign(&mut self, rhs: &Weight) {
        self.0 += &rhs.0;
    }
}

impl<'a> Sum<&'a Weight> for Rat {
    fn sum<I: Iterator<Item = &'a Weight>>(iter: I) -> Rat {
        iter.fold(Rat::zero(), |acc, w| acc + &w.0)
    }
}

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_fraction(&self.0))
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// Parses "p/q", plain integers, and decimal literals into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rat, WeightError> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n = BigInt::from_str(num.trim()).map_err(|_| WeightError::Parse(s.to_string()))?;
        let d = BigInt::from_str(den.trim()).map_err(|_| WeightError::Parse(s.to_string()))?;
        if d.is_zero() {
            return Err(WeightError::ZeroDenominator(s.to_string()));
        }
        return Ok(Rat::new(n, d));
    }
    if let Some((int_part, frac_part)) = s.split_once('.') {
        let int_part = if int_part.is_empty() || int_part == "-" {
            format!("{int_part}0")
        } else {
            int_part.to_string()
        };
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(WeightError::Parse(s.to_string()));
        }
        let neg = int_part.starts_with('-');
        let i = BigInt::from_str(&int_part).map_err(|_| WeightError::Parse(s.to_string()))?;
        let f = BigInt::from_str(frac_part).map_err(|_| WeightError::Parse(s.to_string()))?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let frac = Rat::new(f, scale);
        let whole = Rat::from_integer(i);
        return Ok(if neg { whole - frac } else { whole + frac });
    }
    let n = BigInt::from_str(s).map_err(|_| WeightError::Parse(s.to_string()))?;
    Ok(Rat::from_integer(n))
}

/// Canonical "p/q" rendering (always carries the denominator, reduced form).
pub fn format_fraction(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Decimal rendering at `sig` significant digits, round half away from zero.
///
/// Used only for human-facing report columns; exact values travel as "p/q".
pub fn format_decimal(r: &Rat, sig: usize) -> String {
    assert!(sig > 0);
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let a = r.abs();
    // exp = floor(log10(a)): smallest e with a < 10^(e+1).
    let ten = Rat::from_integer(BigInt::from(10));
    let mut exp: i64 = 0;
    let mut probe = Rat::one();
    if a >= Rat::one() {
        while &probe * &ten <= a {
            probe *= &ten;
            exp += 1;
        }
    } else {
        while probe > a {
            probe /= &ten;
            exp -= 1;
        }
    }
    // Scale so that `sig` digits land left of the point, then round.
    let shift = sig as i64 - 1 - exp;
    let scaled = if shift >= 0 {
        a * num::pow::pow(ten.clone(), shift as usize)
    } else {
        a / num::pow::pow(ten.clone(), (-shift) as usize)
    };
    let half = Rat::new(BigInt::from(1), BigInt::from(2));
    let digits = (scaled + half).floor().to_integer().to_string();
    // digits has `sig` characters unless rounding carried (then sig+1).
    let point = digits.len() as i64 - shift;
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if point <= 0 {
        out.push_str("0.");
        for _ in 0..(-point) {
            out.push('0');
        }
        out.push_str(&digits);
    } else if (point as usize) >= digits.len() {
        out.push_str(&digits);
        for _ in 0..(point as usize - digits.len()) {
            out.push('0');
        }
    } else {
        out.push_str(&digits[..point as usize]);
        out.push('.');
        out.push_str(&digits[point as usize..]);
    }
    if out.contains('.') {
        while out.ends_with('0') {
            out.pop();
        }
        if out.ends_with('.') {
            out.pop();
        }
    }
    out
}

/// Convenience constructor for small rationals in tests and defaults.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}
