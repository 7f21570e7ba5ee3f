use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};

/// An angular momentum quantum number `j` or projection `m`, stored as `2j`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInteger(i64);

impl HalfInteger {
    pub const ZERO: HalfInteger = HalfInteger(0);
    pub const HALF: HalfInteger = HalfInteger(1);

    /// Builds the value `twice / 2`.
    #[inline]
    pub const fn from_twice(twice: i64) -> Self {
        HalfInteger(twice)
    }

    /// Builds an integer value.
    #[inline]
    pub const fn integer(n: i64) -> Self {
        HalfInteger(2 * n)
    }

    #[inline]
    pub const fn twice(self) -> i64 {
        self.0
    }

    #[inline]
    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    #[inline]
    pub fn abs(self) -> Self {
        HalfInteger(self.0.abs())
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.0 as f64 / 2.0
    }

    /// Accepts reals within `1e-9` of a multiple of one half.
    pub fn try_from_f64(x: f64) -> Option<Self> {
        let t = (2.0 * x).round();
        if !t.is_finite() || (2.0 * x - t).abs() > 1e-9 {
            return None;
        }
        Some(HalfInteger(t as i64))
    }

    /// The integer value, if this is one.
    pub fn as_integer(self) -> Option<i64> {
        self.is_integer().then_some(self.0 / 2)
    }
}

/// Checks that `(j, m)` label a state of a spin-`j` multiplet.
pub fn check_projection(j: HalfInteger, m: HalfInteger) -> Result<()> {
    if j.0 < 0 {
        return Err(Error::domain(format!("negative angular momentum j = {j}")));
    }
    if (j.0 - m.0) % 2 != 0 {
        return Err(Error::domain(format!("j - m is not an integer (j = {j}, m = {m})")));
    }
    if m.0.abs() > j.0 {
        return Err(Error::domain(format!("|m| > j (j = {j}, m = {m})")));
    }
    Ok(())
}

impl Add for HalfInteger {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        HalfInteger(self.0 + rhs.0)
    }
}

impl Sub for HalfInteger {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        HalfInteger(self.0 - rhs.0)
    }
}

impl Neg for HalfInteger {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        HalfInteger(-self.0)
    }
}

impl From<i64> for HalfInteger {
    #[inline]
    fn from(n: i64) -> Self {
        HalfInteger::integer(n)
    }
}

impl fmt::Display for HalfInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}
