//! Moments of a marked statistic and numerical estimates of its growth
//! constants, from exact coefficients.
//!
//! For a distribution polynomial `h(v) = sum_k c_k v^k`, the factorial
//! moments are `f_j = h^(j)(1) / h(1)`. Everything stays rational until
//! rendering; only the skewness needs a square root, which is taken to a
//! fixed number of decimal places.

use num_traits::{Signed, Zero};

use crate::algebra::rational::{int, sqrt_floor, to_decimal, to_f64};
use crate::algebra::{Rational, VPoly};
use crate::error::{Error, Result};

/// Fewest nonzero coefficients [`estimate_rho`] accepts.
pub const MIN_RHO_TERMS: usize = 50;
/// Largest index [`estimate_slopes`] needs.
pub const MIN_SLOPE_N: usize = 200;
/// Decimal places kept by the skewness square root.
const SQRT_PLACES: usize = 40;
/// Significant digits in rendered reports.
pub const REPORT_DIGITS: usize = 30;

fn factorial_moments(h: &VPoly, k: usize) -> Result<Vec<Rational>> {
    let total = h.eval_one();
    if total.is_zero() {
        return Err(Error::EmptyClass);
    }
    Ok((1..=k).map(|j| h.derivative_at_one(j) / &total).collect())
}

/// `(mean, variance)` of the statistic with distribution `h(v) / h(1)`.
pub fn exact_moments(h: &VPoly) -> Result<(Rational, Rational)> {
    let f = factorial_moments(h, 2)?;
    let mean = f[0].clone();
    let var = &f[1] + &mean - &mean * &mean;
    Ok((mean, var))
}

/// Third central moment over variance to the power 3/2.
pub fn normality_diagnostic(h: &VPoly) -> Result<Rational> {
    let f = factorial_moments(h, 3)?;
    let m = &f[0];
    let second = &f[1] + m;
    let third = &f[2] + int(3) * &f[1] + m;
    let var = &second - m * m;
    if var.is_zero() {
        return Err(Error::ZeroVariance);
    }
    let mu3 = &third - int(3) * m * &second + int(2) * m * m * m;
    let squared = &mu3 * &mu3 / (&var * &var * &var);
    let root = sqrt_floor(&squared, SQRT_PLACES);
    Ok(if mu3.is_negative() { -root } else { root })
}

/// Ratio estimate of the radius of convergence.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RhoEstimate {
    /// The last ratio `a_{N-1} / a_N`.
    pub raw: Rational,
    /// Second-order Richardson extrapolation of the last ratios.
    pub extrapolated: Rational,
}

/// Estimates the dominant singularity from `a_n / a_{n+1}`, removing the
/// `1/n` and `1/n^2` corrections by Richardson extrapolation.
pub fn estimate_rho(coeffs: &[Rational]) -> Result<RhoEstimate> {
    const LEVELS: usize = 2;
    let nonzero = coeffs.iter().filter(|c| !c.is_zero()).count();
    if nonzero < MIN_RHO_TERMS {
        return Err(Error::InsufficientData(format!(
            "{nonzero} nonzero coefficients, at least {MIN_RHO_TERMS} needed"
        )));
    }
    let last = coeffs.len() - 1;
    let first = last - LEVELS - 1;
    if coeffs[first..].iter().any(Zero::is_zero) {
        return Err(Error::InsufficientData(
            "the last coefficients contain zeros; re-index the series (for example by semilength)".into(),
        ));
    }
    let ratio = |n: usize| &coeffs[n] / &coeffs[n + 1];
    let raw = ratio(last - 1);
    let mut extrapolated = Rational::zero();
    let factorial = |k: usize| (1..=k as i64).product::<i64>();
    for k in 0..=LEVELS {
        let n = first + k;
        let weight = Rational::new(
            num_traits::pow(num_bigint::BigInt::from(n), LEVELS),
            (factorial(k) * factorial(LEVELS - k)).into(),
        );
        let term = ratio(n) * weight;
        if (k + LEVELS).is_multiple_of(2) {
            extrapolated += term;
        } else {
            extrapolated -= term;
        }
    }
    Ok(RhoEstimate { raw, extrapolated })
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MomentRow {
    pub n: usize,
    pub mean: Rational,
    pub variance: Rational,
}

/// Mean and variance of `h_n` for every `n >= 1` in `dists` (indexed from 0).
pub fn moment_table(dists: &[VPoly]) -> Result<Vec<MomentRow>> {
    dists
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, h)| {
            let (mean, variance) = exact_moments(h)?;
            Ok(MomentRow { n, mean, variance })
        })
        .collect()
}

/// Growth of mean and variance per unit of `n`: averaged first differences
/// over the top tenth of the table.
pub fn estimate_slopes(table: &[MomentRow]) -> Result<(Rational, Rational)> {
    let top = table
        .last()
        .ok_or_else(|| Error::InsufficientData("empty table".into()))?;
    if top.n < MIN_SLOPE_N {
        return Err(Error::InsufficientData(format!(
            "moments up to n = {}, at least {MIN_SLOPE_N} needed",
            top.n
        )));
    }
    let span = (top.n / 10).max(1);
    let base = table
        .iter()
        .find(|r| r.n == top.n - span)
        .ok_or_else(|| Error::InsufficientData(format!("no row for n = {}", top.n - span)))?;
    let width = int(span as i64);
    Ok((
        (&top.mean - &base.mean) / &width,
        (&top.variance - &base.variance) / &width,
    ))
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MomentReport {
    pub n_max: usize,
    pub rho_estimate: Option<RhoEstimate>,
    pub mean_slope: Option<Rational>,
    pub var_slope: Option<Rational>,
    pub skewness_at_nmax: Option<Rational>,
    pub convergence_table: Vec<MomentRow>,
}

impl MomentReport {
    /// Builds a report from `h_0, ..., h_N`. Estimates that need more data
    /// than available are left out.
    pub fn from_distributions(dists: &[VPoly]) -> Result<Self> {
        let n_max = dists.len().saturating_sub(1);
        let convergence_table = moment_table(dists)?;
        let counts: Vec<Rational> = dists.iter().map(VPoly::eval_one).collect();
        let rho_estimate = estimate_rho(&counts).ok();
        let (mean_slope, var_slope) = match estimate_slopes(&convergence_table) {
            Ok((m, v)) => (Some(m), Some(v)),
            Err(_) => (None, None),
        };
        let skewness_at_nmax = dists.last().and_then(|h| normality_diagnostic(h).ok());
        Ok(MomentReport {
            n_max,
            rho_estimate,
            mean_slope,
            var_slope,
            skewness_at_nmax,
            convergence_table,
        })
    }
}

/// `r` with [`REPORT_DIGITS`] significant digits.
pub fn render(r: &Rational) -> String {
    to_decimal(r, REPORT_DIGITS)
}

pub fn approx(r: &Rational) -> f64 {
    to_f64(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn moments_of_small_distributions() {
        let h = VPoly::from_ints(&[1, 4, 1]);
        assert_eq!(exact_moments(&h).unwrap(), (int(1), q(1, 3)));
        assert_eq!(exact_moments(&VPoly::one()).unwrap(), (int(0), int(0)));
        assert_eq!(exact_moments(&VPoly::v()).unwrap(), (int(1), int(0)));
        assert_eq!(exact_moments(&VPoly::zero()), Err(Error::EmptyClass));
    }

    #[test]
    fn skewness() {
        assert_eq!(normality_diagnostic(&VPoly::from_ints(&[1, 0, 1])).unwrap(), int(0));
        assert_eq!(normality_diagnostic(&VPoly::v()), Err(Error::ZeroVariance));
        // Bernoulli(1/4): skewness (1 - 2p) / sqrt(p(1-p)) = 2/sqrt(3).
        let s = normality_diagnostic(&VPoly::from_ints(&[3, 1])).unwrap();
        assert!((approx(&s) - 2.0 / 3f64.sqrt()).abs() < 1e-12);
        let s = normality_diagnostic(&VPoly::from_ints(&[1, 3])).unwrap();
        assert!((approx(&s) + 2.0 / 3f64.sqrt()).abs() < 1e-12);
    }

    fn catalan(n: usize) -> Vec<Rational> {
        let mut c = vec![BigInt::from(1)];
        for k in 0..n - 1 {
            let next = &c[k] * BigInt::from(2 * (2 * k + 1)) / BigInt::from(k + 2);
            c.push(next);
        }
        c.into_iter().map(Rational::from_integer).collect()
    }

    fn schroder(n: usize) -> Vec<Rational> {
        // (n+1) S_n = 3(2n-1) S_{n-1} - (n-2) S_{n-2}
        let mut s = vec![BigInt::from(1), BigInt::from(2)];
        for k in 2..n {
            let next = (BigInt::from(3 * (2 * k as i64 - 1)) * &s[k - 1] - BigInt::from(k as i64 - 2) * &s[k - 2])
                / BigInt::from(k + 1);
            s.push(next);
        }
        s.into_iter().map(Rational::from_integer).collect()
    }

    #[test]
    fn rho_of_known_series() {
        let geometric: Vec<Rational> = (0..60)
            .map(|n| Rational::from_integer(BigInt::from(2).pow(n)))
            .collect();
        assert_eq!(estimate_rho(&geometric).unwrap().extrapolated, q(1, 2));
        let c = estimate_rho(&catalan(200)).unwrap();
        assert!((approx(&c.extrapolated) - 0.25).abs() < 1e-4);
        let s = estimate_rho(&schroder(200)).unwrap();
        assert!((approx(&s.extrapolated) - (3.0 - 8f64.sqrt())).abs() < 1e-4);
        assert!(matches!(estimate_rho(&catalan(49)), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn ratio_errors_shrink() {
        for (series, limit) in [(catalan(120), 0.25), (schroder(120), 3.0 - 8f64.sqrt())] {
            let errs: Vec<f64> = (99..119)
                .map(|n| (approx(&(&series[n] / &series[n + 1])) - limit).abs())
                .collect();
            assert!(errs.windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn deterministic_statistic_slopes() {
        let dists: Vec<VPoly> = (0..=200).map(|n| VPoly::monomial(int(1), n)).collect();
        let table = moment_table(&dists).unwrap();
        assert_eq!(table.len(), 200);
        assert_eq!(estimate_slopes(&table).unwrap(), (int(1), int(0)));
        assert!(matches!(
            estimate_slopes(&table[..150]),
            Err(Error::InsufficientData(_))
        ));
        let report = MomentReport::from_distributions(&dists).unwrap();
        assert_eq!(report.skewness_at_nmax, None);
        assert_eq!(report.mean_slope, Some(int(1)));
    }
}
