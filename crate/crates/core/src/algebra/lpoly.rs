use std::ops::{Add, Mul, Neg, Sub};

use super::rational::Rational;
use super::vpoly::VPoly;

/// Laurent polynomial in `u` with [`VPoly`] coefficients.
///
/// This is one `t`-slice of a bivariate series; recurrences that proceed
/// order by order in `t` work on vectors of these.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct LaurentVPoly {
    min_deg: i64,
    coeffs: Vec<VPoly>,
}

impl LaurentVPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(VPoly::one(), 0)
    }

    pub fn monomial(c: VPoly, k: i64) -> Self {
        Self::from_coeffs(k, vec![c])
    }

    pub fn from_coeffs(min_deg: i64, coeffs: Vec<VPoly>) -> Self {
        let mut p = LaurentVPoly { min_deg, coeffs };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(VPoly::is_zero) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|c| c.is_zero()).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.min_deg += lead as i64;
        }
        if self.coeffs.is_empty() {
            self.min_deg = 0;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn min_deg(&self) -> i64 {
        self.min_deg
    }

    pub fn max_deg(&self) -> Option<i64> {
        (!self.is_zero()).then(|| self.min_deg + self.coeffs.len() as i64 - 1)
    }

    pub fn coeffs(&self) -> &[VPoly] {
        &self.coeffs
    }

    pub fn coeff(&self, k: i64) -> VPoly {
        let idx = k - self.min_deg;
        if idx < 0 {
            return VPoly::zero();
        }
        self.coeffs.get(idx as usize).cloned().unwrap_or_default()
    }

    /// Iterates `(exponent, coefficient)` over nonzero terms.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &VPoly)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.min_deg + i as i64, c))
    }

    fn reserve_span(&mut self, lo: i64, hi: i64) {
        if self.coeffs.is_empty() {
            self.min_deg = lo;
            self.coeffs = vec![VPoly::zero(); (hi - lo + 1) as usize];
            return;
        }
        if lo < self.min_deg {
            let extra = (self.min_deg - lo) as usize;
            self.coeffs.splice(0..0, std::iter::repeat_n(VPoly::zero(), extra));
            self.min_deg = lo;
        }
        let top = self.min_deg + self.coeffs.len() as i64 - 1;
        if hi > top {
            self.coeffs
                .resize(self.coeffs.len() + (hi - top) as usize, VPoly::zero());
        }
    }

    /// `self += c * u^shift * other`.
    pub fn add_mul_shifted(&mut self, other: &LaurentVPoly, c: &VPoly, shift: i64) {
        if other.is_zero() || c.is_zero() {
            return;
        }
        let lo = other.min_deg + shift;
        let hi = lo + other.coeffs.len() as i64 - 1;
        self.reserve_span(lo, hi);
        let base = (lo - self.min_deg) as usize;
        let mono = c.as_monomial();
        for (i, x) in other.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let dst = &mut self.coeffs[base + i];
            match mono {
                Some((r, k)) => dst.add_scaled_shifted(x, r, k),
                None => dst.add_product(x, c),
            }
        }
        self.normalize();
    }

    /// Splits into the terms below `u^k` and the rest divided by `u^k`.
    pub fn split_at(&self, k: i64) -> (Self, Self) {
        let cut = (k - self.min_deg).clamp(0, self.coeffs.len() as i64) as usize;
        let low = Self::from_coeffs(self.min_deg, self.coeffs[..cut].to_vec());
        let high = Self::from_coeffs(self.min_deg.max(k) - k, self.coeffs[cut..].to_vec());
        (low, high)
    }

    /// Keeps only the exponents in `lo..=hi`.
    pub fn clip(&mut self, lo: i64, hi: i64) {
        if self.is_zero() {
            return;
        }
        let top = self.min_deg + self.coeffs.len() as i64 - 1;
        if hi < top {
            let keep = (hi - self.min_deg + 1).max(0) as usize;
            self.coeffs.truncate(keep);
        }
        if lo > self.min_deg {
            let drop = ((lo - self.min_deg) as usize).min(self.coeffs.len());
            self.coeffs.drain(..drop);
            self.min_deg = lo;
        }
        self.normalize();
    }

    /// Drops every term with a negative exponent.
    pub fn nonneg_part(&self) -> Self {
        if self.min_deg >= 0 {
            return self.clone();
        }
        let skip = (-self.min_deg) as usize;
        Self::from_coeffs(0, self.coeffs.iter().skip(skip).cloned().collect())
    }

    /// Value at `u = r` (`r` must be nonzero if negative exponents occur).
    pub fn eval_u(&self, r: &Rational) -> VPoly {
        let mut acc = VPoly::zero();
        for (k, c) in self.terms() {
            let w = if k >= 0 {
                num_traits::pow(r.clone(), k as usize)
            } else {
                num_traits::pow(r.recip(), (-k) as usize)
            };
            acc.add_scaled_shifted(c, &w, 0);
        }
        acc
    }
}

impl Add for &LaurentVPoly {
    type Output = LaurentVPoly;
    fn add(self, rhs: &LaurentVPoly) -> LaurentVPoly {
        let mut out = self.clone();
        out.add_mul_shifted(rhs, &VPoly::one(), 0);
        out
    }
}

impl Neg for &LaurentVPoly {
    type Output = LaurentVPoly;
    fn neg(self) -> LaurentVPoly {
        LaurentVPoly {
            min_deg: self.min_deg,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Sub for &LaurentVPoly {
    type Output = LaurentVPoly;
    fn sub(self, rhs: &LaurentVPoly) -> LaurentVPoly {
        let mut out = self.clone();
        out.add_mul_shifted(rhs, &VPoly::int(-1), 0);
        out
    }
}

impl Mul for &LaurentVPoly {
    type Output = LaurentVPoly;
    fn mul(self, rhs: &LaurentVPoly) -> LaurentVPoly {
        let mut out = LaurentVPoly::zero();
        for (k, c) in rhs.terms() {
            out.add_mul_shifted(self, c, k);
        }
        out
    }
}
