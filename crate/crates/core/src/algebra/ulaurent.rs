use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use super::lpoly::LaurentVPoly;
use super::rational::Rational;
use super::series::{TruncSeries, EXACT};
use super::vpoly::VPoly;
use crate::error::{Error, Result};

/// Laurent polynomial in `u` with [`TruncSeries`] coefficients.
///
/// `coeffs[i]` is the coefficient of `u^(min_deg + i)`. The first and last
/// stored coefficients are nonzero; the zero object stores nothing. All
/// coefficients share one truncation order.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct ULaurent {
    min_deg: i64,
    coeffs: Vec<TruncSeries>,
}

impl ULaurent {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(TruncSeries::one())
    }

    pub fn constant(c: TruncSeries) -> Self {
        Self::monomial(c, 0)
    }

    /// `c * u^k`
    pub fn monomial(c: TruncSeries, k: i64) -> Self {
        Self::from_coeffs(k, vec![c])
    }

    /// Exact `c * t^a * u^b`.
    pub fn term(c: VPoly, a: usize, b: i64) -> Self {
        Self::monomial(TruncSeries::monomial(c, a), b)
    }

    /// The variable `u`.
    pub fn u() -> Self {
        Self::term(VPoly::one(), 0, 1)
    }

    pub fn from_coeffs(min_deg: i64, coeffs: Vec<TruncSeries>) -> Self {
        let mut p = ULaurent { min_deg, coeffs };
        p.normalize();
        p
    }

    fn normalize(&mut self) {
        // One truncation order for the whole object.
        let order = self.coeffs.iter().map(TruncSeries::order).min().unwrap_or(EXACT);
        if order != EXACT {
            for c in &mut self.coeffs {
                if c.order() != order {
                    *c = c.truncate(order);
                }
            }
        }
        while self.coeffs.last().is_some_and(TruncSeries::is_zero) {
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

    pub fn coeffs(&self) -> &[TruncSeries] {
        &self.coeffs
    }

    /// `(lowest, highest)` exponent of `u`, `None` for zero.
    pub fn span(&self) -> Option<(i64, i64)> {
        (!self.is_zero()).then(|| (self.min_deg, self.min_deg + self.coeffs.len() as i64 - 1))
    }

    /// Smallest order among the coefficients ([`EXACT`] for exact objects).
    pub fn order(&self) -> usize {
        self.coeffs.iter().map(TruncSeries::order).min().unwrap_or(EXACT)
    }

    /// Coefficient of `u^k`; the exact zero series outside the span.
    pub fn coeff_u(&self, k: i64) -> TruncSeries {
        let idx = k - self.min_deg;
        if idx < 0 || idx as usize >= self.coeffs.len() {
            return TruncSeries::zero(self.order());
        }
        self.coeffs[idx as usize].clone()
    }

    /// Iterates `(exponent, coefficient)` over nonzero coefficients.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &TruncSeries)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.min_deg + i as i64, c))
    }

    /// Multiplies by `u^k`.
    pub fn mul_u_pow(&self, k: i64) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        ULaurent {
            min_deg: self.min_deg + k,
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn scale(&self, c: &TruncSeries) -> Self {
        Self::from_coeffs(self.min_deg, self.coeffs.iter().map(|x| x * c).collect())
    }

    /// Terms with exponent `>= 0` (the projection `{u^{>=0}}`).
    pub fn project_nonneg_u(&self) -> Self {
        self.project(|k| k >= 0)
    }

    /// Terms with exponent `< 0` (the projection `{u^{<0}}`).
    pub fn negative_part(&self) -> Self {
        self.project(|k| k < 0)
    }

    fn project(&self, keep: impl Fn(i64) -> bool) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if keep(self.min_deg + i as i64) {
                    c.clone()
                } else {
                    TruncSeries::zero(EXACT)
                }
            })
            .collect();
        Self::from_coeffs(self.min_deg, coeffs)
    }

    /// Lowers every coefficient's order to at most `order`.
    pub fn truncate_t(&self, order: usize) -> Self {
        Self::from_coeffs(self.min_deg, self.coeffs.iter().map(|c| c.truncate(order)).collect())
    }

    /// Substitutes `u := r`. Negative exponents need `r != 0`.
    pub fn eval_u(&self, r: &Rational) -> TruncSeries {
        if r.is_zero() {
            assert!(self.min_deg >= 0, "cannot evaluate a u-pole at u = 0");
            return self.coeff_u(0);
        }
        let mut acc = TruncSeries::zero(EXACT);
        for (k, c) in self.terms() {
            let w = if k >= 0 {
                num_traits::pow(r.clone(), k as usize)
            } else {
                num_traits::pow(r.recip(), (-k) as usize)
            };
            acc = &acc + &c.scale(&VPoly::constant(w));
        }
        if self.is_zero() {
            return TruncSeries::zero(EXACT);
        }
        acc.truncate(self.order())
    }

    /// Substitutes a value for the mark variable `v`.
    pub fn eval_v(&self, v: &Rational) -> Self {
        Self::from_coeffs(self.min_deg, self.coeffs.iter().map(|c| c.eval_v(v)).collect())
    }

    /// True when no negative power of `u` occurs.
    pub fn is_polynomial(&self) -> bool {
        self.is_zero() || self.min_deg >= 0
    }

    /// True if both agree on every `t`-coefficient below `order`.
    pub fn agrees_to(&self, other: &Self, order: usize) -> bool {
        self.truncate_t(order) == other.truncate_t(order)
    }

    /// Converts to one Laurent polynomial in `u` per power of `t`, for `t^0 .. t^(order-1)`.
    pub fn to_t_major(&self, order: usize) -> Vec<LaurentVPoly> {
        let order = order.min(self.order());
        assert!(order != EXACT, "t-major view needs a finite order");
        let width = self.coeffs.len();
        (0..order)
            .map(|n| {
                let slice = (0..width)
                    .map(|i| self.coeffs[i].coeffs().get(n).cloned().unwrap_or_default())
                    .collect();
                LaurentVPoly::from_coeffs(self.min_deg, slice)
            })
            .collect()
    }

    /// Inverse of [`to_t_major`](Self::to_t_major); the result has order `slices.len()`.
    pub fn from_t_major(slices: &[LaurentVPoly]) -> Self {
        let order = slices.len();
        let (lo, hi) = slices
            .iter()
            .filter(|s| !s.is_zero())
            .fold((i64::MAX, i64::MIN), |(lo, hi), s| {
                (lo.min(s.min_deg()), hi.max(s.max_deg().unwrap()))
            });
        if lo > hi {
            return Self::zero();
        }
        let coeffs = (lo..=hi)
            .map(|k| TruncSeries::from_coeffs(slices.iter().map(|s| s.coeff(k)).collect(), order))
            .collect();
        Self::from_coeffs(lo, coeffs)
    }

    /// Multiplicative inverse in `Laurent[u][[t]]`, to `t`-order `order`.
    ///
    /// The `t^0` part must be a single term `c u^k` with `c` a nonzero
    /// rational constant; the result then exists and is unique.
    pub fn invert_series(&self, order: usize) -> Result<Self> {
        let order = order.min(self.order());
        if order == EXACT {
            return Err(Error::UnboundedOrder);
        }
        let slices = self.to_t_major(order);
        let lead = slices.first().ok_or(Error::NotAUnit)?;
        if lead.coeffs().len() != 1 {
            return Err(Error::NotAUnit);
        }
        let shift = lead.min_deg();
        let c = lead.coeffs()[0]
            .as_constant()
            .filter(|c| !c.is_zero())
            .ok_or(Error::NotAUnit)?;
        let inv_lead = VPoly::constant(c.recip());
        let neg_inv_lead = VPoly::constant(-c.recip());
        let mut out: Vec<LaurentVPoly> = Vec::with_capacity(order);
        out.push(LaurentVPoly::monomial(inv_lead, -shift));
        for n in 1..order {
            let mut acc = LaurentVPoly::zero();
            for m in 1..=n {
                let a = &slices[m];
                if a.is_zero() {
                    continue;
                }
                let prod = a * &out[n - m];
                acc.add_mul_shifted(&prod, &VPoly::one(), 0);
            }
            let mut next = LaurentVPoly::zero();
            next.add_mul_shifted(&acc, &neg_inv_lead, -shift);
            out.push(next);
        }
        Ok(Self::from_t_major(&out))
    }

    /// Division by a monic polynomial in `u`: `self = q * divisor + r` with
    /// `deg r < deg divisor`. Both operands must be polynomials in `u`.
    pub fn div_rem_monic(&self, divisor: &ULaurent) -> (ULaurent, ULaurent) {
        assert!(self.is_polynomial() && divisor.is_polynomial());
        let (_, dhi) = divisor.span().expect("division by zero");
        assert!(divisor.coeff_u(dhi).is_one(), "divisor must be monic");
        let Some((_, mut hi)) = self.span() else {
            return (Self::zero(), Self::zero());
        };
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while hi >= dhi {
            let lead = rem.coeff_u(hi);
            if !lead.is_zero() {
                let q = ULaurent::monomial(lead, hi - dhi);
                rem = &rem - &(&q * divisor);
                quot = &quot + &q;
            }
            hi -= 1;
        }
        (quot, rem)
    }
}

impl Add for &ULaurent {
    type Output = ULaurent;
    fn add(self, rhs: &ULaurent) -> ULaurent {
        let (a, b) = match (self.span(), rhs.span()) {
            (None, _) => return rhs.clone(),
            (_, None) => return self.clone(),
            (Some(a), Some(b)) => (a, b),
        };
        let lo = a.0.min(b.0);
        let hi = a.1.max(b.1);
        let coeffs = (lo..=hi)
            .map(|k| {
                let x = self.coeff_at(k);
                let y = rhs.coeff_at(k);
                match (x, y) {
                    (Some(x), Some(y)) => x + y,
                    (Some(x), None) => x.clone(),
                    (None, Some(y)) => y.clone(),
                    (None, None) => TruncSeries::zero(EXACT),
                }
            })
            .collect();
        ULaurent::from_coeffs(lo, coeffs)
    }
}

impl ULaurent {
    fn coeff_at(&self, k: i64) -> Option<&TruncSeries> {
        let idx = k - self.min_deg;
        if idx < 0 {
            None
        } else {
            self.coeffs.get(idx as usize)
        }
    }
}

impl Neg for &ULaurent {
    type Output = ULaurent;
    fn neg(self) -> ULaurent {
        ULaurent {
            min_deg: self.min_deg,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Sub for &ULaurent {
    type Output = ULaurent;
    fn sub(self, rhs: &ULaurent) -> ULaurent {
        self + &(-rhs)
    }
}

/// Convolution in `u`, coefficients multiplied as series.
impl Mul for &ULaurent {
    type Output = ULaurent;
    fn mul(self, rhs: &ULaurent) -> ULaurent {
        let (Some(a), Some(b)) = (self.span(), rhs.span()) else {
            return ULaurent::zero();
        };
        let lo = a.0 + b.0;
        let width = (a.1 + b.1 - lo + 1) as usize;
        let mut coeffs: Vec<Option<TruncSeries>> = vec![None; width];
        for (i, x) in self.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in rhs.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                let p = x * y;
                let slot = &mut coeffs[i + j];
                *slot = Some(match slot.take() {
                    Some(acc) => &acc + &p,
                    None => p,
                });
            }
        }
        let coeffs = coeffs
            .into_iter()
            .map(|c| c.unwrap_or_else(|| TruncSeries::zero(EXACT)))
            .collect();
        ULaurent::from_coeffs(lo, coeffs)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for ULaurent {
            type Output = ULaurent;
            fn $m(self, rhs: ULaurent) -> ULaurent {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for ULaurent {
    type Output = ULaurent;
    fn neg(self) -> ULaurent {
        -&self
    }
}

impl From<TruncSeries> for ULaurent {
    fn from(c: TruncSeries) -> Self {
        ULaurent::constant(c)
    }
}

/// Human-readable form, highest power of `u` first:
/// `(t)u + (1 - t^2) + (-t)u^-1`.
impl fmt::Display for ULaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.terms().collect::<Vec<_>>().into_iter().rev() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c})")?,
                1 if c.is_one() => write!(f, "u")?,
                1 => write!(f, "({c})u")?,
                _ if c.is_one() => write!(f, "u^{k}")?,
                _ => write!(f, "({c})u^{k}")?,
            }
        }
        Ok(())
    }
}

impl One for ULaurent {
    fn one() -> Self {
        ULaurent::one()
    }
}

impl Zero for ULaurent {
    fn zero() -> Self {
        ULaurent::zero()
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// exact `c t^a u^b`
    fn m(c: i64, a: usize, b: i64) -> ULaurent {
        ULaurent::term(VPoly::int(c), a, b)
    }

    #[test]
    fn multiplication_examples() {
        let u_plus_inv = &m(1, 0, 1) + &m(1, 0, -1);
        assert_eq!(&u_plus_inv * &ULaurent::u(), &m(1, 0, 2) + &m(1, 0, 0));
        let p = &(&m(1, 1, 1) + &m(1, 1, -1)) + &m(1, 2, 0);
        assert_eq!(&p * &ULaurent::one(), p);
        let u_minus_t = &ULaurent::u() - &m(1, 1, 0);
        let sq = &u_minus_t * &u_minus_t;
        assert_eq!(sq, &(&m(1, 0, 2) - &m(2, 1, 1)) + &m(1, 2, 0));
    }

    #[test]
    fn projections() {
        let a = &m(1, 0, 2) + &m(1, 0, -1);
        assert_eq!(a.project_nonneg_u(), m(1, 0, 2));
        assert!((&m(1, 0, -1) + &m(1, 0, -2)).project_nonneg_u().is_zero());
        assert_eq!(&a.project_nonneg_u() + &a.negative_part(), a);
    }

    #[test]
    fn coefficient_extraction() {
        let a = &m(1, 0, 2) + &m(3, 0, 0);
        assert_eq!(a.coeff_u(0), TruncSeries::from_ints(&[3], EXACT));
        assert!(m(1, 0, -1).coeff_u(0).is_zero());
        let p = &(&m(1, 1, 1) + &m(1, 1, -1)) + &m(1, 2, 0);
        assert_eq!(p.coeff_u(0), TruncSeries::from_ints(&[0, 0, 1], EXACT));
    }

    #[test]
    fn canonical_form() {
        let a = ULaurent::from_coeffs(
            -3,
            vec![TruncSeries::zero(EXACT), TruncSeries::one(), TruncSeries::zero(EXACT)],
        );
        assert_eq!(a.span(), Some((-2, -2)));
        assert!((&a - &a).is_zero());
    }

    #[test]
    fn series_inverse_of_dyck_kernel() {
        // 1/(1 - t(u + 1/u)) evaluated at u = 1 is 1/(1 - 2t)
        let k = &ULaurent::one() - &(&m(1, 1, 1) + &m(1, 1, -1));
        let inv = k.invert_series(8).unwrap();
        assert!((&k * &inv).agrees_to(&ULaurent::one(), 8));
        let at_one = inv.eval_u(&Rational::one());
        assert_eq!(at_one, TruncSeries::from_ints(&[1, 2, 4, 8, 16, 32, 64, 128], 8));
        assert_eq!(m(1, 1, 0).invert_series(4), Err(Error::NotAUnit));
    }

    #[test]
    fn monic_division() {
        // (u^2 - t^2) = (u + t)(u - t)
        let a = &m(1, 0, 2) - &m(1, 2, 0);
        let d = &ULaurent::u() - &m(1, 1, 0);
        let (q, r) = a.div_rem_monic(&d);
        assert_eq!(q, &ULaurent::u() + &m(1, 1, 0));
        assert!(r.is_zero());
    }

    #[test]
    fn t_major_round_trip() {
        let p = &(&m(1, 1, 1) + &m(2, 1, -1)) + &m(1, 2, 0);
        let slices = p.to_t_major(4);
        assert_eq!(slices.len(), 4);
        assert_eq!(ULaurent::from_t_major(&slices), p.truncate_t(4));
    }
}
