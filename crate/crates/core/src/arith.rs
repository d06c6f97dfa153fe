//! Integer helpers and exact thresholds of the form `a + b·√r`.

use std::cmp::Ordering;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = Ratio<i128>;

pub fn rational(n: i128, d: i128) -> Rational {
    Ratio::new(n, d)
}

pub fn int(n: i128) -> Rational {
    Ratio::from_integer(n)
}

/// Trial division.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 || n % 3 == 0 {
        return false;
    }
    let mut d = 5u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 || n % (d + 2) == 0 {
            return false;
        }
        d += 6;
    }
    true
}

/// Smallest prime strictly greater than `n`.
pub fn next_prime(n: u64) -> u64 {
    let mut c = n + 1;
    while !is_prime(c) {
        c += 1;
    }
    c
}

/// Prime factorization by trial division, with multiplicity, ascending.
pub fn factorize(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        while n % d == 0 {
            out.push(d);
            n /= d;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Residue of a signed integer modulo `m`, in `[0, m)`.
#[inline]
pub fn reduce(c: i64, m: u64) -> u64 {
    (c as i128).rem_euclid(m as i128) as u64
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let g = (a as i128).extended_gcd(&(m as i128));
    if g.gcd != 1 {
        return None;
    }
    Some(g.x.rem_euclid(m as i128) as u64)
}

pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

pub fn ceil_rational(x: &Rational) -> i128 {
    x.ceil().to_integer()
}

pub fn floor_rational(x: &Rational) -> i128 {
    x.floor().to_integer()
}

/// Exact real number `rational + coeff·√radicand`.
///
/// All thresholds involving `√n` are stored in this form, so membership tests
/// are decided by comparing squares of rationals and never touch floating point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Surd {
    pub rational: Rational,
    pub coeff: Rational,
    pub radicand: u64,
}

impl Surd {
    pub fn new(rational: Rational, coeff: Rational, radicand: u64) -> Self {
        Surd {
            rational,
            coeff,
            radicand,
        }
    }

    pub fn from_rational(r: Rational) -> Self {
        Surd::new(r, Rational::zero(), 0)
    }

    /// Compares `self` with a rational number exactly.
    pub fn cmp_rational(&self, x: &Rational) -> Ordering {
        // self - x = coeff·√r - d with d = x - rational
        let d = x - self.rational;
        let s = self.coeff;
        if s.is_zero() || self.radicand == 0 {
            return Rational::zero().cmp(&d);
        }
        let lhs = s * s * int(self.radicand as i128);
        let rhs = d * d;
        if s.is_positive() {
            if d.is_negative() {
                Ordering::Greater
            } else {
                lhs.cmp(&rhs)
            }
        } else if d.is_positive() || d.is_zero() {
            // s√r < 0 <= d
            Ordering::Less
        } else {
            // both negative: s√r vs d, larger magnitude is smaller
            rhs.cmp(&lhs)
        }
    }

    /// `x <= self`
    pub fn admits_le(&self, x: &Rational) -> bool {
        self.cmp_rational(x) != Ordering::Less
    }

    /// `x >= self`
    pub fn admits_ge(&self, x: &Rational) -> bool {
        self.cmp_rational(x) != Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.cmp_rational(&Rational::zero()) == Ordering::Less
    }

    pub fn scale(&self, k: Rational) -> Surd {
        Surd::new(self.rational * k, self.coeff * k, self.radicand)
    }

    pub fn add_rational(&self, k: Rational) -> Surd {
        Surd::new(self.rational + k, self.coeff, self.radicand)
    }

    pub fn to_f64(&self) -> f64 {
        self.rational.to_f64().unwrap_or(f64::NAN)
            + self.coeff.to_f64().unwrap_or(f64::NAN) * (self.radicand as f64).sqrt()
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeff.is_zero() {
            return write!(f, "{}", self.rational);
        }
        let sign = if self.coeff.is_negative() { '-' } else { '+' };
        write!(
            f,
            "{} {} {}*sqrt({})",
            self.rational,
            sign,
            self.coeff.abs(),
            self.radicand
        )
    }
}

impl Serialize for Surd {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Surd", 2)?;
        st.serialize_field("exact", &self.to_string())?;
        st.serialize_field("approx", &self.to_f64())?;
        st.end()
    }
}

/// Parses `"3/20"`, `"-2"` or a finite decimal such as `"0.05"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((n, d)) = s.split_once('/') {
        let n: i128 = n.trim().parse().map_err(|_| bad())?;
        let d: i128 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Ratio::new(n, d));
    }
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(bad());
    }
    if !whole.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    if frac.len() > 30 {
        return Err(bad());
    }
    let digits = format!("{whole}{frac}");
    let num: i128 = if digits.is_empty() {
        0
    } else {
        digits.parse().map_err(|_| bad())?
    };
    let den = 10i128.pow(frac.len() as u32);
    let r = Ratio::new(num, den);
    Ok(if neg { -r } else { r })
}

/// Serializes a rational as `"p/q"` alongside a float approximation.
pub fn rational_json(r: &Rational) -> RationalJson {
    RationalJson {
        exact: r.to_string(),
        approx: r.to_f64().unwrap_or(f64::NAN),
    }
}

/// `serialize_with` helper emitting [`RationalJson`].
pub fn serialize_rational<S: Serializer>(
    r: &Rational,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    rational_json(r).serialize(s)
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct RationalJson {
    pub exact: String,
    pub approx: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(next_prime(13), 17);
        assert_eq!(factorize(15015), vec![3, 5, 7, 11, 13]);
        assert_eq!(factorize(12), vec![2, 2, 3]);
    }

    #[test]
    fn inverses() {
        assert_eq!(inv_mod(3, 7), Some(5));
        assert_eq!(inv_mod(3, 6), None);
        assert_eq!(reduce(-2, 5), 3);
    }

    #[test]
    fn surd_comparisons() {
        // 4 - 3√8 ≈ -4.485
        let t = Surd::new(int(4), int(-3), 8);
        assert!(t.is_negative());
        assert_eq!(t.cmp_rational(&rational(-9, 2)), Ordering::Greater);
        assert_eq!(t.cmp_rational(&rational(-448, 100)), Ordering::Less);
        // 3√9 = 9 exactly
        let r = Surd::new(int(0), int(3), 9);
        assert_eq!(r.cmp_rational(&int(9)), Ordering::Equal);
        assert!(r.admits_le(&int(9)));
        assert!(!r.admits_le(&rational(91, 10)));
    }

    #[test]
    fn decimal_parsing() {
        assert_eq!(parse_rational("0.05").unwrap(), rational(1, 20));
        assert_eq!(parse_rational("-3/6").unwrap(), rational(-1, 2));
        assert_eq!(parse_rational("2").unwrap(), int(2));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
    }
}
