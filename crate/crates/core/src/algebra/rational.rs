//! Rational scalars.
//!
//! `num-rational` normalizes after every operation with a gcd, which is the
//! dominant cost when all values are integers (the usual case here). The
//! helpers below skip normalization when both operands are integers.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

#[inline]
pub(crate) fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

/// Stand-in used while a value is taken apart; allocation free.
#[inline]
fn hole() -> Rational {
    Rational::new_raw(BigInt::zero(), BigInt::zero())
}

#[inline]
pub(crate) fn add_assign(a: &mut Rational, b: &Rational) {
    if is_integer(a) && is_integer(b) {
        let (mut n, d) = std::mem::replace(a, hole()).into_raw();
        n += b.numer();
        *a = Rational::new_raw(n, d);
    } else {
        *a += b;
    }
}

#[inline]
pub(crate) fn sub_assign(a: &mut Rational, b: &Rational) {
    if is_integer(a) && is_integer(b) {
        let (mut n, d) = std::mem::replace(a, hole()).into_raw();
        n -= b.numer();
        *a = Rational::new_raw(n, d);
    } else {
        *a -= b;
    }
}

#[inline]
pub(crate) fn mul(a: &Rational, b: &Rational) -> Rational {
    if is_integer(a) && is_integer(b) {
        Rational::new_raw(a.numer() * b.numer(), BigInt::one())
    } else {
        a * b
    }
}

/// `a += b * c`
#[inline]
pub(crate) fn add_mul_assign(a: &mut Rational, b: &Rational, c: &Rational) {
    if c.is_one() {
        add_assign(a, b);
    } else if b.is_one() {
        add_assign(a, c);
    } else {
        let p = mul(b, c);
        add_assign(a, &p);
    }
}

/// Parses `"3"`, `"-7"`, `"2/3"` or a finite decimal such as `"0.25"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::parse(0, format!("not a rational number: `{s}`"));
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole: BigInt = if whole.is_empty() || whole == "-" || whole == "+" {
            BigInt::zero()
        } else {
            whole.parse().map_err(|_| bad())?
        };
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let frac: BigInt = frac.parse().map_err(|_| bad())?;
        let magnitude = whole.abs() * &scale + frac;
        let numer = if negative { -magnitude } else { magnitude };
        return Ok(Rational::new(numer, scale));
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

/// Renders `r` with `digits` significant decimal digits (truncated, not rounded).
pub fn to_decimal(r: &Rational, digits: usize) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let negative = r.is_negative();
    let r = r.abs();
    let ten = BigInt::from(10);
    // exponent e with 10^e <= r < 10^(e+1)
    let mut e: i64 = 0;
    let mut scaled = r.clone();
    while scaled >= Rational::from_integer(ten.clone()) {
        scaled /= Rational::from_integer(ten.clone());
        e += 1;
    }
    while scaled < Rational::one() {
        scaled *= Rational::from_integer(ten.clone());
        e -= 1;
    }
    let shift = digits as i64 - 1 - e;
    let mantissa = if shift >= 0 {
        (r * Rational::from_integer(num_traits::pow(ten.clone(), shift as usize))).to_integer()
    } else {
        (r / Rational::from_integer(num_traits::pow(ten.clone(), (-shift) as usize))).to_integer()
    };
    let mut s = mantissa.to_string();
    let point = s.len() as i64 - shift;
    if shift > 0 {
        if point <= 0 {
            s = format!("0.{}{}", "0".repeat((-point) as usize), s);
        } else {
            s.insert(point as usize, '.');
        }
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.pop();
        }
    } else {
        s.push_str(&"0".repeat((-shift) as usize));
    }
    if negative {
        format!("-{s}")
    } else {
        s
    }
}

/// `sqrt(r)` rounded down to `places` decimal places; `r` must be non-negative.
pub fn sqrt_floor(r: &Rational, places: usize) -> Rational {
    assert!(!r.is_negative(), "square root of a negative number");
    let scale = num_traits::pow(BigInt::from(10), places);
    let scaled = (r * Rational::from_integer(&scale * &scale)).to_integer();
    Rational::new(scaled.sqrt(), scale)
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
