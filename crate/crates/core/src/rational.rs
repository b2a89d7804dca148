//! Exact rationals over unbounded integers.
//!
//! [`Rational`] is `num_rational::BigRational`, which keeps values reduced
//! with a positive denominator. Its `Display` prints `p/q`, or just `p` for
//! integers, which is also the text form accepted by [`parse_rational`].

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Parses `p/q`, `p`, or a decimal literal such as `0.25`.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::Parse("empty rational".into()));
    }
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        let negative = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches(['-', '+']), frac);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let mut num: BigInt = digits.parse().map_err(|_| bad())?;
        if negative {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10u32), frac.len());
        return Ok(Rational::new(num, den));
    }
    let p: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(p))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn from_biguint(n: &BigUint) -> Rational {
    Rational::from_integer(BigInt::from_biguint(Sign::Plus, n.clone()))
}

/// Fractional part in `[0, 1)`.
pub fn frac(x: &Rational) -> Rational {
    x - x.floor()
}

/// Nearest integer, ties rounded up.
pub fn round_half_up(x: &Rational) -> BigInt {
    (x + ratio(1, 2)).floor().to_integer()
}

/// Converts a rational in `[0, 1)` to the nearest-ish `f64` (error below `2^-60`
/// even when numerator and denominator are huge).
pub fn unit_to_f64(x: &Rational) -> f64 {
    debug_assert!(!x.is_negative() && x < &Rational::one());
    let (n, d) = (x.numer(), x.denom());
    if n.bits() <= 52 && d.bits() <= 52 {
        return n.to_f64().unwrap() / d.to_f64().unwrap();
    }
    let scaled: BigInt = (n << 64u32).div_floor(d);
    scaled.to_f64().unwrap() / 2f64.powi(64)
}

/// Lossy conversion of an arbitrary rational.
pub fn to_f64(x: &Rational) -> f64 {
    let whole = x.floor();
    whole.to_integer().to_f64().unwrap_or(f64::NAN) + unit_to_f64(&(x - &whole))
}

/// Exact rational value of a finite float.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// `p/q` text, integers without a denominator.
pub fn format_rational(x: &Rational) -> String {
    x.to_string()
}
