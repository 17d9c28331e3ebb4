use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_integer::Integer;
use serde::{Serialize, Serializer};
use thiserror::Error;

/// An element of `ℚ/ℤ`, written additively: the reduced fraction
/// `numerator / denominator` with `0 ≤ numerator < denominator`.
///
/// `Angle::ZERO` is the neutral phase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Angle {
    num: u64,
    den: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AngleParseError {
    #[error("malformed angle '{0}'")]
    Malformed(String),
    #[error("fraction not reduced: '{0}'")]
    NotReduced(String),
    #[error("angle '{0}' outside [0, 1)")]
    OutOfRange(String),
}

impl Angle {
    pub const ZERO: Angle = Angle { num: 0, den: 1 };

    /// The class of `num / den` modulo 1. Panics if `den == 0`.
    pub fn new(num: i64, den: u64) -> Self {
        assert!(den > 0, "angle denominator must be positive");
        let d = den as i128;
        let n = (num as i128).rem_euclid(d);
        let g = n.gcd(&d);
        Angle {
            num: (n / g) as u64,
            den: (d / g) as u64,
        }
    }

    pub fn numerator(self) -> u64 {
        self.num
    }

    pub fn denominator(self) -> u64 {
        self.den
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    /// Smallest `k ≥ 1` with `k·self = 0`.
    pub fn order(self) -> u64 {
        self.den
    }

    /// `k · self`.
    pub fn scale(self, k: i64) -> Self {
        let n = (self.num as i128 * k as i128).rem_euclid(self.den as i128);
        Angle::new(n as i64, self.den)
    }
}

impl Default for Angle {
    fn default() -> Self {
        Angle::ZERO
    }
}

impl Add for Angle {
    type Output = Angle;
    fn add(self, rhs: Angle) -> Angle {
        let l = self.den.lcm(&rhs.den);
        let n = self.num * (l / self.den) + rhs.num * (l / rhs.den);
        Angle::new((n % l) as i64, l)
    }
}

impl Neg for Angle {
    type Output = Angle;
    fn neg(self) -> Angle {
        Angle::new((self.den - self.num) as i64, self.den)
    }
}

impl Sub for Angle {
    type Output = Angle;
    fn sub(self, rhs: Angle) -> Angle {
        self + (-rhs)
    }
}

impl std::iter::Sum for Angle {
    fn sum<I: Iterator<Item = Angle>>(iter: I) -> Angle {
        iter.fold(Angle::ZERO, Add::add)
    }
}

/// Ordered by value in `[0, 1)`.
impl Ord for Angle {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl PartialOrd for Angle {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.num == 0 {
            write!(f, "0")
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl Serialize for Angle {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Accepts `0` or a reduced fraction `p/q` with `0 ≤ p < q`.
impl FromStr for Angle {
    type Err = AngleParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let malformed = || AngleParseError::Malformed(s.to_string());
        let digits = |t: &str| !t.is_empty() && t.bytes().all(|b| b.is_ascii_digit());
        if s == "0" {
            return Ok(Angle::ZERO);
        }
        let (p, q) = s.split_once('/').ok_or_else(malformed)?;
        if !digits(p) || !digits(q) {
            return Err(malformed());
        }
        let p: u64 = p.parse().map_err(|_| malformed())?;
        let q: u64 = q.parse().map_err(|_| malformed())?;
        if q == 0 || q > i64::MAX as u64 {
            return Err(malformed());
        }
        if p >= q {
            return Err(AngleParseError::OutOfRange(s.to_string()));
        }
        if p.gcd(&q) != 1 {
            return Err(AngleParseError::NotReduced(s.to_string()));
        }
        Ok(Angle { num: p, den: q })
    }
}
