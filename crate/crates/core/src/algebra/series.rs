use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Signed, Zero};

use super::rational::Rational;
use super::vpoly::VPoly;
use crate::error::{Error, Result};

/// Order marker for series that are exact polynomials in `t`.
pub const EXACT: usize = usize::MAX;

static ZERO: VPoly = VPoly::zero();

/// Truncated power series in `t` with [`VPoly`] coefficients:
/// `sum_{n < order} c_n t^n + O(t^order)`.
///
/// `order` counts the known coefficients. Exact polynomials (step weights,
/// kernels, adjugates) carry [`EXACT`]. Binary operations propagate the
/// minimum order. Trailing zero coefficients are not stored, so a
/// coefficient past the end of `coeffs` but below `order` is zero.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct TruncSeries {
    order: usize,
    coeffs: Vec<VPoly>,
}

impl TruncSeries {
    pub fn zero(order: usize) -> Self {
        TruncSeries {
            order,
            coeffs: Vec::new(),
        }
    }

    /// The exact constant 1.
    pub fn one() -> Self {
        Self::constant(VPoly::one())
    }

    pub fn constant(c: VPoly) -> Self {
        Self::monomial(c, 0)
    }

    /// Exact `c * t^k`.
    pub fn monomial(c: VPoly, k: usize) -> Self {
        let mut coeffs = vec![VPoly::zero(); k];
        coeffs.push(c);
        Self::from_coeffs(coeffs, EXACT)
    }

    /// Builds a series from its first coefficients; entries at or beyond
    /// `order` are dropped.
    pub fn from_coeffs(mut coeffs: Vec<VPoly>, order: usize) -> Self {
        coeffs.truncate(order);
        let mut s = TruncSeries { order, coeffs };
        s.normalize();
        s
    }

    pub fn from_ints(coeffs: &[i64], order: usize) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| VPoly::int(c)).collect(), order)
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(VPoly::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn is_exact(&self) -> bool {
        self.order == EXACT
    }

    /// Stored coefficients, lowest power first (trailing zeros omitted).
    pub fn coeffs(&self) -> &[VPoly] {
        &self.coeffs
    }

    /// Coefficient of `t^n`.
    ///
    /// Panics if `n >= order`: that coefficient is unknown.
    pub fn coeff(&self, n: usize) -> &VPoly {
        assert!(
            n < self.order,
            "coefficient t^{n} requested from a series known to O(t^{})",
            self.order
        );
        self.coeffs.get(n).unwrap_or(&ZERO)
    }

    pub fn try_coeff(&self, n: usize) -> Result<&VPoly> {
        if n < self.order {
            Ok(self.coeffs.get(n).unwrap_or(&ZERO))
        } else {
            Err(Error::OutOfOrder { n, order: self.order })
        }
    }

    /// True when every known coefficient is zero.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0].is_one()
    }

    /// Index of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    /// Degree in `t` of the stored part.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Lowers the order to `min(self.order, order)`.
    pub fn truncate(&self, order: usize) -> Self {
        let order = order.min(self.order);
        Self::from_coeffs(self.coeffs.clone(), order)
    }

    /// True if the series agree on every coefficient below `order`
    /// (both must be known that far).
    pub fn agrees_to(&self, other: &Self, order: usize) -> bool {
        assert!(order <= self.order && order <= other.order);
        (0..order).all(|n| self.coeff(n) == other.coeff(n))
    }

    /// Multiplies by `t^k`; the order grows by `k`.
    pub fn mul_t_pow(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero(self.order.saturating_add(k));
        }
        let mut coeffs = vec![VPoly::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        TruncSeries {
            order: self.order.saturating_add(k),
            coeffs,
        }
    }

    pub fn scale(&self, c: &VPoly) -> Self {
        let coeffs = self.coeffs.iter().map(|x| x * c).collect();
        Self::from_coeffs(coeffs, self.order)
    }

    /// Substitutes a value for the mark variable.
    pub fn eval_v(&self, v: &Rational) -> Self {
        let coeffs = self.coeffs.iter().map(|c| c.specialize(v)).collect();
        Self::from_coeffs(coeffs, self.order)
    }

    /// Inverse up to the series' own order.
    pub fn invert(&self) -> Result<Self> {
        if self.order == EXACT {
            if self.coeffs.len() == 1 {
                return self.invert_to(1).map(|s| Self::from_coeffs(s.coeffs, EXACT));
            }
            return Err(if self.unit_constant().is_some() {
                Error::UnboundedOrder
            } else {
                Error::NotAUnit
            });
        }
        self.invert_to(self.order)
    }

    fn unit_constant(&self) -> Option<Rational> {
        let c = self.coeffs.first()?.as_constant()?;
        (!c.is_zero()).then_some(c)
    }

    /// Inverse known to `min(order, self.order)`.
    ///
    /// A series is a unit when its `t^0` coefficient is a nonzero constant.
    pub fn invert_to(&self, order: usize) -> Result<Self> {
        let c0 = self.unit_constant().ok_or(Error::NotAUnit)?;
        let order = order.min(self.order);
        if order == EXACT {
            return Err(Error::UnboundedOrder);
        }
        let inv_c0 = c0.recip();
        let mut out: Vec<VPoly> = Vec::with_capacity(order);
        for n in 0..order {
            if n == 0 {
                out.push(VPoly::constant(inv_c0.clone()));
                continue;
            }
            let mut acc = VPoly::zero();
            for (m, a) in self.coeffs.iter().enumerate().take(n + 1).skip(1) {
                if !a.is_zero() {
                    acc.add_product(a, &out[n - m]);
                }
            }
            out.push(acc.scale(&-inv_c0.clone()));
        }
        Ok(Self::from_coeffs(out, order))
    }
}

impl Add for &TruncSeries {
    type Output = TruncSeries;
    fn add(self, rhs: &TruncSeries) -> TruncSeries {
        let order = self.order.min(rhs.order);
        let len = self.coeffs.len().max(rhs.coeffs.len()).min(order);
        let coeffs = (0..len)
            .map(|n| match (self.coeffs.get(n), rhs.coeffs.get(n)) {
                (Some(a), Some(b)) => a + b,
                (Some(a), None) => a.clone(),
                (None, Some(b)) => b.clone(),
                (None, None) => VPoly::zero(),
            })
            .collect();
        TruncSeries::from_coeffs(coeffs, order)
    }
}

impl Neg for &TruncSeries {
    type Output = TruncSeries;
    fn neg(self) -> TruncSeries {
        TruncSeries {
            order: self.order,
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Sub for &TruncSeries {
    type Output = TruncSeries;
    fn sub(self, rhs: &TruncSeries) -> TruncSeries {
        self + &(-rhs)
    }
}

/// Cauchy product truncated to the smaller order; zero coefficients are skipped.
impl Mul for &TruncSeries {
    type Output = TruncSeries;
    fn mul(self, rhs: &TruncSeries) -> TruncSeries {
        let order = self.order.min(rhs.order);
        if self.is_zero() || rhs.is_zero() {
            return TruncSeries::zero(order);
        }
        let len = (self.coeffs.len() + rhs.coeffs.len() - 1).min(order);
        let mut coeffs = vec![VPoly::zero(); len];
        for (i, a) in self.coeffs.iter().enumerate() {
            if i >= len {
                break;
            }
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if !b.is_zero() {
                    coeffs[i + j].add_product(a, b);
                }
            }
        }
        TruncSeries::from_coeffs(coeffs, order)
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for TruncSeries {
            type Output = TruncSeries;
            fn $m(self, rhs: TruncSeries) -> TruncSeries {
                (&self).$m(&rhs)
            }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul);

impl Neg for TruncSeries {
    type Output = TruncSeries;
    fn neg(self) -> TruncSeries {
        -&self
    }
}

impl From<VPoly> for TruncSeries {
    fn from(c: VPoly) -> Self {
        TruncSeries::constant(c)
    }
}

impl Zero for TruncSeries {
    fn zero() -> Self {
        TruncSeries::zero(EXACT)
    }
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }
}

/// `1 + 2t + (1 + v)t^2 + O(t^5)`
impl fmt::Display for TruncSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (n, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let negative = c.as_constant().is_some_and(|r| r.is_negative());
            let c = if negative { -c } else { c.clone() };
            match (first, negative) {
                (true, true) => write!(f, "-")?,
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
                (true, false) => {}
            }
            first = false;
            let body = c.to_string();
            let wrapped = if n > 0 && (body.contains(' ') || body.contains('v')) {
                format!("({body})")
            } else {
                body
            };
            match n {
                0 => write!(f, "{wrapped}")?,
                _ if c.is_one() => write!(f, "{}", t_power(n))?,
                _ => write!(f, "{wrapped}{}", t_power(n))?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        if self.order != EXACT {
            write!(f, " + O(t^{})", self.order)?;
        }
        Ok(())
    }
}

fn t_power(n: usize) -> String {
    if n == 1 {
        "t".to_string()
    } else {
        format!("t^{n}")
    }
}
