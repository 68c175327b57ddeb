//! Exact rational numbers and their `"p/q"` string form.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// Exact rational used for every stability parameter.
pub type Rational = Ratio<i64>;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Ratio::new(numer, denom)
}

pub fn int(value: i64) -> Rational {
    Ratio::from_integer(value)
}

pub fn half() -> Rational {
    Ratio::new(1, 2)
}

/// Renders `r` as `"p/q"`, always with an explicit denominator.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parses `"p/q"` or a bare integer `"p"`. Decimals are rejected.
pub fn parse_rational(s: &str) -> Result<Rational, Error> {
    let s = s.trim();
    let bad = || Error::Parse(format!("invalid rational {s:?}: expected \"p/q\""));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p = i64::from_str(p).map_err(|_| bad())?;
    let q = i64::from_str(q).map_err(|_| bad())?;
    if q == 0 {
        return Err(Error::Parse(format!(
            "invalid rational {s:?}: zero denominator"
        )));
    }
    Ok(Ratio::new(p, q))
}

/// Whether `r` is an integer.
pub fn is_integral(r: &Rational) -> bool {
    r.denom().is_one()
}

/// Smallest integer strictly greater than `r`.
pub fn strict_ceil(r: &Rational) -> i64 {
    r.floor().to_integer() + 1
}

/// Largest integer strictly smaller than `r`.
pub fn strict_floor(r: &Rational) -> i64 {
    r.ceil().to_integer() - 1
}

pub fn sum<'a, I: IntoIterator<Item = &'a Rational>>(values: I) -> Rational {
    values.into_iter().fold(Rational::zero(), |acc, v| acc + v)
}

/// Integer nearest to `r`; callers never pass half-integers.
pub fn nearest_integer(r: &Rational) -> i64 {
    (r + half()).floor().to_integer()
}

/// The `n`-th prime (0-based), by trial division.
pub fn nth_prime(n: usize) -> i64 {
    let mut count = 0;
    let mut candidate: i64 = 1;
    loop {
        candidate += 1;
        let is_prime = (2..)
            .take_while(|d: &i64| d * d <= candidate)
            .all(|d| !candidate.is_multiple_of(&d));
        if is_prime {
            if count == n {
                return candidate;
            }
            count += 1;
        }
    }
}

/// Serde adapter storing a [`Rational`] as a `"p/q"` string.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RationalString(pub Rational);

impl fmt::Display for RationalString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

impl Serialize for RationalString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for RationalString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_rational(&s)
            .map(RationalString)
            .map_err(serde::de::Error::custom)
    }
}
