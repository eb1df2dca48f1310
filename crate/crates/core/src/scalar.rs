//! Coefficient rings.
//!
//! Algebraic identities are checked over exact rationals; numeric evaluation
//! of continuous-time operators runs over `f64`.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

/// Exact rational numbers with arbitrary precision.
pub type Rational = num_rational::BigRational;

pub trait Scalar:
    Clone + Debug + Display + PartialEq + PartialOrd + Num + std::ops::Neg<Output = Self> + Send + Sync + 'static
{
    fn from_i64(v: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn to_float(&self) -> f64;
    fn abs_value(&self) -> Self;
    /// Multiplicative inverse, `None` for zero.
    fn recip(&self) -> Option<Self>;
    fn parse(s: &str) -> Option<Self>;
    const EXACT: bool;

    fn powu(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc * self.clone();
        }
        acc
    }
}

impl Scalar for Rational {
    fn from_i64(v: i64) -> Self {
        Rational::from_integer(BigInt::from(v))
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_float(&self) -> f64 {
        match (self.numer().to_f64(), self.denom().to_f64()) {
            (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
            _ => {
                // shift both parts down to 60 significant bits
                let nb = self.numer().bits() as i64;
                let db = self.denom().bits() as i64;
                let sn = (nb - 60).max(0);
                let sd = (db - 60).max(0);
                let n = (self.numer().abs() >> sn as usize).to_f64().unwrap_or(f64::NAN);
                let d = (self.denom() >> sd as usize).to_f64().unwrap_or(f64::NAN);
                let sign = if self.is_negative() { -1.0 } else { 1.0 };
                sign * n / d * 2f64.powi((sn - sd) as i32)
            }
        }
    }

    fn abs_value(&self) -> Self {
        self.abs()
    }

    fn recip(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(num_traits::Inv::inv(self.clone()))
        }
    }

    fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Ok(r) = Rational::from_str(s) {
            return Some(r);
        }
        parse_decimal(s)
    }

    const EXACT: bool = true;
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn from_rational(r: &Rational) -> Self {
        Scalar::to_float(r)
    }

    fn to_float(&self) -> f64 {
        *self
    }

    fn abs_value(&self) -> Self {
        self.abs()
    }

    fn recip(&self) -> Option<Self> {
        if *self == 0.0 {
            None
        } else {
            Some(1.0 / self)
        }
    }

    fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        if let Ok(v) = s.parse::<f64>() {
            return Some(v);
        }
        Rational::from_str(s).ok().map(|r| Scalar::to_float(&r))
    }

    const EXACT: bool = false;
}

/// Parses a plain decimal literal such as `-0.125` into an exact rational.
fn parse_decimal(s: &str) -> Option<Rational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.')?;
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer = BigInt::from_str_radix(if digits.is_empty() { "0" } else { &digits }, 10).ok()?;
    let denom = num_traits::pow(BigInt::from(10), frac_part.len());
    let r = Rational::new(numer, denom);
    Some(if neg { -r } else { r })
}

/// Convenience constructor for exact rationals.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Binomial coefficient as an exact integer.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Tolerance-based comparison used for float coefficients.
pub fn approx_eq(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(<Rational as Scalar>::parse("3/2"), Some(rat(3, 2)));
        assert_eq!(<Rational as Scalar>::parse("-0.125"), Some(rat(-1, 8)));
        assert_eq!(<Rational as Scalar>::parse("7"), Some(rat_int(7)));
        assert_eq!(<Rational as Scalar>::parse("abc"), None);
        assert_eq!(<f64 as Scalar>::parse("1/4"), Some(0.25));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(10, 3), BigInt::from(120));
        assert_eq!(binomial(3, 5), BigInt::zero());
        assert_eq!(factorial(5), BigInt::from(120));
    }

    #[test]
    fn huge_rational_to_f64() {
        let big = rat_int(10).pow(400) / rat_int(3).pow(390);
        let expected = 10f64.powf(400.0 - 390.0 * 3f64.log10());
        assert!(((big.to_float() - expected) / expected).abs() < 1e-9);
        let tiny = rat_int(3).pow(390) / rat_int(10).pow(400);
        assert!(((tiny.to_float() * expected) - 1.0).abs() < 1e-9);
    }
}
