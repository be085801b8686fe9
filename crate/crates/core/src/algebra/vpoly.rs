use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::rational::{self, Rational};
use crate::error::{Error, Result};

/// Polynomial in the mark variable `v` with rational coefficients.
///
/// `coeffs[k]` is the coefficient of `v^k`. Trailing zeros are never stored,
/// so the zero polynomial is the empty list.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct VPoly {
    coeffs: Vec<Rational>,
}

impl VPoly {
    pub const fn zero() -> Self {
        VPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0)
    }

    pub fn int(c: i64) -> Self {
        Self::constant(rational::int(c))
    }

    /// `c * v^k`
    pub fn monomial(c: Rational, k: usize) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        VPoly { coeffs }
    }

    /// The mark variable itself.
    pub fn v() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        let mut p = VPoly { coeffs };
        p.normalize();
        p
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| rational::int(c)).collect())
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(Zero::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// The value if this is a constant (including zero).
    pub fn as_constant(&self) -> Option<Rational> {
        match self.coeffs.len() {
            0 => Some(Rational::zero()),
            1 => Some(self.coeffs[0].clone()),
            _ => None,
        }
    }

    /// `Some((c, k))` when the polynomial is the single term `c v^k`.
    pub fn as_monomial(&self) -> Option<(&Rational, usize)> {
        let k = self.degree()?;
        self.coeffs[..k].iter().all(Zero::is_zero).then(|| (&self.coeffs[k], k))
    }

    pub fn eval(&self, v: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for c in self.coeffs.iter().rev() {
            acc = rational::mul(&acc, v);
            rational::add_assign(&mut acc, c);
        }
        acc
    }

    /// Value at `v = 1`, the sum of the coefficients.
    pub fn eval_one(&self) -> Rational {
        let mut acc = Rational::zero();
        for c in &self.coeffs {
            rational::add_assign(&mut acc, c);
        }
        acc
    }

    /// The `k`-th derivative evaluated at `v = 1`:
    /// `sum_j j (j-1) ... (j-k+1) c_j`.
    pub fn derivative_at_one(&self, k: usize) -> Rational {
        let mut acc = Rational::zero();
        for (j, c) in self.coeffs.iter().enumerate().skip(k) {
            let falling: BigInt = (0..k).map(|i| BigInt::from(j - i)).product();
            rational::add_mul_assign(&mut acc, c, &Rational::from_integer(falling));
        }
        acc
    }

    pub fn scale(&self, r: &Rational) -> Self {
        if r.is_zero() {
            return Self::zero();
        }
        VPoly {
            coeffs: self.coeffs.iter().map(|c| rational::mul(c, r)).collect(),
        }
    }

    /// Multiplies by `v^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Rational::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        VPoly { coeffs }
    }

    /// `self += r * v^k * other`.
    pub fn add_scaled_shifted(&mut self, other: &VPoly, r: &Rational, k: usize) {
        if other.is_zero() || r.is_zero() {
            return;
        }
        let needed = other.coeffs.len() + k;
        if self.coeffs.len() < needed {
            self.coeffs.resize(needed, Rational::zero());
        }
        for (dst, c) in self.coeffs[k..].iter_mut().zip(&other.coeffs) {
            rational::add_mul_assign(dst, c, r);
        }
        self.normalize();
    }

    /// `self += a * b` without materializing the product.
    pub fn add_product(&mut self, a: &VPoly, b: &VPoly) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        if let Some((c, k)) = b.as_monomial() {
            return self.add_scaled_shifted(a, c, k);
        }
        if let Some((c, k)) = a.as_monomial() {
            return self.add_scaled_shifted(b, c, k);
        }
        let needed = a.coeffs.len() + b.coeffs.len() - 1;
        if self.coeffs.len() < needed {
            self.coeffs.resize(needed, Rational::zero());
        }
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    rational::add_mul_assign(&mut self.coeffs[i + j], x, y);
                }
            }
        }
        self.normalize();
    }

    /// Substitutes `v := r`, leaving a constant polynomial.
    pub fn specialize(&self, r: &Rational) -> Self {
        Self::constant(self.eval(r))
    }
}

impl AddAssign<&VPoly> for VPoly {
    fn add_assign(&mut self, rhs: &VPoly) {
        if self.coeffs.len() < rhs.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), Rational::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            rational::add_assign(a, b);
        }
        self.normalize();
    }
}

impl SubAssign<&VPoly> for VPoly {
    fn sub_assign(&mut self, rhs: &VPoly) {
        if self.coeffs.len() < rhs.coeffs.len() {
            self.coeffs.resize(rhs.coeffs.len(), Rational::zero());
        }
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            rational::sub_assign(a, b);
        }
        self.normalize();
    }
}

impl Add for &VPoly {
    type Output = VPoly;
    fn add(self, rhs: &VPoly) -> VPoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub for &VPoly {
    type Output = VPoly;
    fn sub(self, rhs: &VPoly) -> VPoly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &VPoly {
    type Output = VPoly;
    fn neg(self) -> VPoly {
        VPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul for &VPoly {
    type Output = VPoly;
    fn mul(self, rhs: &VPoly) -> VPoly {
        let mut out = VPoly::zero();
        out.add_product(self, rhs);
        out
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for VPoly {
            type Output = VPoly;
            fn $m(self, rhs: VPoly) -> VPoly {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for VPoly {
    type Output = VPoly;
    fn neg(self) -> VPoly {
        -&self
    }
}

impl From<i64> for VPoly {
    fn from(c: i64) -> Self {
        VPoly::int(c)
    }
}

/// Renders in ascending powers: `1 + 4v + v^2`, `-1/2 - v^3`.
impl fmt::Display for VPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let magnitude = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            first = false;
            let var = match k {
                0 => String::new(),
                1 => "v".to_string(),
                _ => format!("v^{k}"),
            };
            if k == 0 || !magnitude.is_one() {
                write!(f, "{magnitude}")?;
            }
            write!(f, "{var}")?;
        }
        Ok(())
    }
}

/// Parses the [`Display`](fmt::Display) form back.
impl FromStr for VPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::parse(0, format!("not a v-polynomial: `{s}`"));
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if compact.is_empty() {
            return Err(bad());
        }
        let mut out = VPoly::zero();
        let mut terms = Vec::new();
        let mut start = 0;
        for (i, ch) in compact.char_indices() {
            if (ch == '+' || ch == '-') && i > start {
                terms.push(&compact[start..i]);
                start = i;
            }
        }
        terms.push(&compact[start..]);
        for term in terms {
            let (negative, body) = match term.as_bytes().first() {
                Some(b'-') => (true, &term[1..]),
                Some(b'+') => (false, &term[1..]),
                _ => (false, term),
            };
            let (coeff, power) = match body.find('v') {
                Some(pos) => {
                    let coeff = if pos == 0 {
                        Rational::one()
                    } else {
                        rational::parse_rational(&body[..pos]).map_err(|_| bad())?
                    };
                    let rest = &body[pos + 1..];
                    let power = if rest.is_empty() {
                        1
                    } else {
                        rest.strip_prefix('^')
                            .and_then(|p| p.parse::<usize>().ok())
                            .ok_or_else(bad)?
                    };
                    (coeff, power)
                }
                None => (rational::parse_rational(body).map_err(|_| bad())?, 0),
            };
            let coeff = if negative { -coeff } else { coeff };
            out += &VPoly::monomial(coeff, power);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_strips_trailing_zeros() {
        assert_eq!(VPoly::from_ints(&[1, 2, 0, 0]), VPoly::from_ints(&[1, 2]));
        assert!(VPoly::from_ints(&[0, 0]).is_zero());
        let p = VPoly::from_ints(&[1, 1]);
        assert!((&p - &p).coeffs().is_empty());
    }

    #[test]
    fn evaluation_at_one_is_coefficient_sum() {
        let h = VPoly::from_ints(&[1, 4, 1]);
        assert_eq!(h.eval_one(), rational::int(6));
        assert_eq!(h.eval(&rational::int(1)), rational::int(6));
        assert_eq!(h.eval(&rational::int(2)), rational::int(13));
    }

    #[test]
    fn derivatives_at_one() {
        // h = 1 + 4v + v^2 : h' = 4 + 2v, h'' = 2
        let h = VPoly::from_ints(&[1, 4, 1]);
        assert_eq!(h.derivative_at_one(0), rational::int(6));
        assert_eq!(h.derivative_at_one(1), rational::int(6));
        assert_eq!(h.derivative_at_one(2), rational::int(2));
        assert_eq!(h.derivative_at_one(3), rational::int(0));
    }

    #[test]
    fn product_of_binomials() {
        let a = VPoly::from_ints(&[1, 1]);
        assert_eq!(&a * &a, VPoly::from_ints(&[1, 2, 1]));
        assert_eq!(&a * &VPoly::v(), VPoly::from_ints(&[0, 1, 1]));
    }

    #[test]
    fn display_and_parse_round_trip() {
        let cases = [
            VPoly::from_ints(&[1, 4, 1]),
            VPoly::from_ints(&[0, -1, 0, 3]),
            VPoly::zero(),
            VPoly::constant(Rational::new((-1).into(), 2.into())),
            VPoly::from_coeffs(vec![rational::int(0), Rational::new(2.into(), 3.into())]),
        ];
        assert_eq!(cases[0].to_string(), "1 + 4v + v^2");
        assert_eq!(cases[1].to_string(), "-v + 3v^3");
        for p in cases {
            let back: VPoly = p.to_string().parse().unwrap();
            assert_eq!(back, p);
        }
        assert!("1 + w".parse::<VPoly>().is_err());
    }
}
