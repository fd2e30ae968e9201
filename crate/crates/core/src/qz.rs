//! Rationals and the circle group ℚ/ℤ.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

pub type Rational = num_rational::Rational64;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(n)
}

/// Canonical "p/q" formatting (plain "p" for integers).
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn serialize_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rational(r))
}

pub fn serialize_opt_rational<S: serde::Serializer>(
    r: &Option<Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&fmt_rational(r)),
        None => s.serialize_none(),
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().ok()?;
            let d: i64 = d.trim().parse().ok()?;
            if d == 0 {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => s.parse::<i64>().ok().map(Rational::from_integer),
    }
}

/// An element of ℚ/ℤ, stored as its representative in [0, 1).
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct QmodZ(Rational);

impl QmodZ {
    pub fn new(r: Rational) -> Self {
        let f = r - r.floor();
        QmodZ(f)
    }

    pub fn from_frac(n: i64, d: i64) -> Self {
        QmodZ::new(Rational::new(n, d))
    }

    pub fn zero() -> Self {
        QmodZ(Rational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn value(&self) -> Rational {
        self.0
    }

    /// Multiplicative order of the element in ℚ/ℤ (its reduced denominator).
    pub fn order(&self) -> i64 {
        *self.0.denom()
    }

    /// Representative in (-1/2, 1/2].
    pub fn centered(&self) -> Rational {
        if self.0 > rat(1, 2) {
            self.0 - Rational::one()
        } else {
            self.0
        }
    }

    pub fn times(&self, k: i64) -> Self {
        QmodZ::new(self.0 * k)
    }
}

impl fmt::Debug for QmodZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_rational(&self.0))
    }
}

impl fmt::Display for QmodZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_rational(&self.0))
    }
}

impl Serialize for QmodZ {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rational(&self.0))
    }
}

impl Add for QmodZ {
    type Output = QmodZ;
    fn add(self, o: QmodZ) -> QmodZ {
        QmodZ::new(self.0 + o.0)
    }
}

impl AddAssign for QmodZ {
    fn add_assign(&mut self, o: QmodZ) {
        *self = *self + o;
    }
}

impl Sub for QmodZ {
    type Output = QmodZ;
    fn sub(self, o: QmodZ) -> QmodZ {
        QmodZ::new(self.0 - o.0)
    }
}

impl Neg for QmodZ {
    type Output = QmodZ;
    fn neg(self) -> QmodZ {
        QmodZ::new(-self.0)
    }
}

impl Mul<i64> for QmodZ {
    type Output = QmodZ;
    fn mul(self, k: i64) -> QmodZ {
        self.times(k)
    }
}

/// Exact pairing of a rational vector with an integer vector.
pub fn dot_rat_int(x: &[Rational], y: &[i64]) -> Rational {
    x.iter().zip(y).map(|(a, &b)| *a * b).sum()
}

pub fn dot(x: &[i64], y: &[i64]) -> i64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn lcm_all<I: IntoIterator<Item = i64>>(it: I) -> i64 {
    it.into_iter().fold(1, |acc, x| acc.lcm(&x.abs().max(1)))
}

/// Exact square root of a non-negative rational, if it is rational.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = isqrt(*r.numer())?;
    let d = isqrt(*r.denom())?;
    Some(Rational::new(n, d))
}

fn isqrt(n: i64) -> Option<i64> {
    if n < 0 {
        return None;
    }
    let mut s = (n as f64).sqrt() as i64;
    while s * s > n {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= n {
        s += 1;
    }
    (s * s == n).then_some(s)
}

/// Returns `e` with `base^e == value` when `value` is an integral power (e ≥ 0).
pub fn exact_log(value: &Rational, base: u64) -> Option<u32> {
    if !value.is_integer() || *value.numer() < 1 || base < 2 {
        return None;
    }
    let mut v = *value.numer() as u64;
    let mut e = 0;
    while v > 1 {
        if !v.is_multiple_of(base) {
            return None;
        }
        v /= base;
        e += 1;
    }
    Some(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qmodz_normalizes() {
        assert_eq!(QmodZ::from_frac(7, 3), QmodZ::from_frac(1, 3));
        assert_eq!(QmodZ::from_frac(-1, 3), QmodZ::from_frac(2, 3));
        assert_eq!(QmodZ::from_frac(2, 4).order(), 2);
        assert!(QmodZ::from_frac(6, 3).is_zero());
    }

    #[test]
    fn rational_format_roundtrip() {
        for r in [rat(-3, 4), int(5), rat(7, 2), int(0)] {
            assert_eq!(parse_rational(&fmt_rational(&r)), Some(r));
        }
        assert_eq!(parse_rational("1/0"), None);
    }

    #[test]
    fn sqrt_and_log() {
        assert_eq!(rational_sqrt(&rat(9, 4)), Some(rat(3, 2)));
        assert_eq!(rational_sqrt(&rat(2, 1)), None);
        assert_eq!(exact_log(&int(125), 5), Some(3));
        assert_eq!(exact_log(&int(1), 5), Some(0));
        assert_eq!(exact_log(&int(12), 5), None);
    }
}
