//! The kernel `K = det(I - A)`, its adjugate, and the factor of `K` that
//! carries its small roots.

use std::collections::HashMap;

use crate::algebra::{LaurentVPoly, TruncSeries, ULaurent, UMatrix, VPoly, EXACT};
use crate::error::{Error, Result};

/// Sizes up to this use memoized cofactor expansion, larger ones Berkowitz.
const LAPLACE_MAX_DIM: usize = 6;

/// `I - A`.
pub fn kernel_matrix(adjacency: &UMatrix) -> UMatrix {
    &UMatrix::identity(adjacency.dim()) - adjacency
}

/// Exact determinant over `Q[v][u, 1/u][[t]]`. Both algorithms used are
/// division free, so Laurent entries need no clearing.
pub fn determinant(m: &UMatrix) -> ULaurent {
    if m.dim() <= LAPLACE_MAX_DIM {
        laplace(m)
    } else {
        berkowitz(m)
    }
}

/// Cofactor expansion along rows, memoized on the set of used columns.
pub fn laplace(m: &UMatrix) -> ULaurent {
    fn go(m: &UMatrix, used: u64, memo: &mut HashMap<u64, ULaurent>) -> ULaurent {
        let n = m.dim();
        let row = used.count_ones() as usize;
        if row == n {
            return ULaurent::one();
        }
        if let Some(d) = memo.get(&used) {
            return d.clone();
        }
        let mut acc = ULaurent::zero();
        let mut sign_neg = false;
        for j in 0..n {
            if used & (1 << j) != 0 {
                continue;
            }
            let a = &m[(row, j)];
            if !a.is_zero() {
                let sub = go(m, used | (1 << j), memo);
                if !sub.is_zero() {
                    let term = a * &sub;
                    acc = if sign_neg { &acc - &term } else { &acc + &term };
                }
            }
            sign_neg = !sign_neg;
        }
        memo.insert(used, acc.clone());
        acc
    }
    assert!(m.dim() < 64);
    go(m, 0, &mut HashMap::new())
}

/// Berkowitz' division-free characteristic polynomial; returns `det(m)`.
pub fn berkowitz(m: &UMatrix) -> ULaurent {
    let n = m.dim();
    // Coefficients of det(xI - M_r) for the leading r x r block, highest power first.
    let mut charpoly = vec![ULaurent::one(), -m[(0, 0)].clone()];
    for r in 1..n {
        let mut q = Vec::with_capacity(r + 2);
        q.push(ULaurent::one());
        q.push(-m[(r, r)].clone());
        let mut x: Vec<ULaurent> = (0..r).map(|i| m[(i, r)].clone()).collect();
        for _ in 0..r {
            let dot = (0..r).fold(ULaurent::zero(), |acc, j| {
                if m[(r, j)].is_zero() || x[j].is_zero() {
                    acc
                } else {
                    &acc + &(&m[(r, j)] * &x[j])
                }
            });
            q.push(-dot);
            x = (0..r)
                .map(|i| {
                    (0..r).fold(ULaurent::zero(), |acc, j| {
                        if m[(i, j)].is_zero() || x[j].is_zero() {
                            acc
                        } else {
                            &acc + &(&m[(i, j)] * &x[j])
                        }
                    })
                })
                .collect();
        }
        charpoly = (0..r + 2)
            .map(|i| {
                (0..=i.min(r)).fold(ULaurent::zero(), |acc, j| {
                    if q[i - j].is_zero() || charpoly[j].is_zero() {
                        acc
                    } else {
                        &acc + &(&q[i - j] * &charpoly[j])
                    }
                })
            })
            .collect();
    }
    let c = charpoly.pop().unwrap();
    if n.is_multiple_of(2) {
        c
    } else {
        -c
    }
}

/// Matrix of signed cofactors, transposed: `m * adjugate(m) = det(m) * I`.
pub fn adjugate(m: &UMatrix) -> UMatrix {
    let n = m.dim();
    if n == 1 {
        return UMatrix::identity(1);
    }
    let mut adj = UMatrix::zero(n);
    for i in 0..n {
        for j in 0..n {
            let d = determinant(&m.minor(j, i));
            adj[(i, j)] = if (i + j) % 2 == 0 { d } else { -d };
        }
    }
    adj
}

/// `adj(m) * (1, ..., 1)^T`.
pub fn autocorrelation_vector(m: &UMatrix) -> Vec<ULaurent> {
    let adj = adjugate(m);
    (0..adj.dim()).map(|i| adj.row_sum(i)).collect()
}

/// The kernel and its factorization `u^e K = small_factor * unit_factor`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KernelData {
    pub kernel: ULaurent,
    /// `u^e K`, a polynomial in `u`.
    pub cleared: ULaurent,
    /// Number of small roots, the order of the pole of `K` at `u = 0`.
    pub e: usize,
    /// Monic of degree `e` in `u`; every lower coefficient vanishes at `t = 0`.
    pub small_factor: ULaurent,
    /// Equal to 1 at `t = 0`.
    pub unit_factor: ULaurent,
    pub order: usize,
}

impl KernelData {
    /// The small root series when there is exactly one small root.
    pub fn small_root(&self) -> Option<TruncSeries> {
        (self.e == 1).then(|| -self.small_factor.coeff_u(0))
    }
}

/// Splits `u^e K` into its small-root factor and a unit, to `t`-order `order`.
///
/// Since every step has positive length, `K(0,u) = 1`, so `u^e K = u^e` at
/// `t = 0`. Writing `u^e K = N Q` with `N = u^e + ...` and `Q = 1 + ...`,
/// comparing `t^j` coefficients gives
/// `N_j + u^e Q_j = P_j - sum_{0<a<j} N_a Q_{j-a}`, and the right side splits
/// uniquely into its part below `u^e` (`N_j`) and the rest (`u^e Q_j`).
pub fn small_factor(k: &ULaurent, order: usize) -> Result<KernelData> {
    if order == EXACT {
        return Err(Error::UnboundedOrder);
    }
    let order = order.min(k.order());
    let e = usize::try_from(-k.min_deg().min(0)).unwrap();
    let cleared = k.mul_u_pow(e as i64);
    if order == 0 {
        return Err(Error::OutOfOrder { n: 0, order });
    }
    let p = cleared.to_t_major(order);
    if p[0] != LaurentVPoly::monomial(VPoly::one(), e as i64) {
        return Err(Error::DegenerateKernel);
    }
    let e_deg = e as i64;
    let mut n_parts = vec![LaurentVPoly::monomial(VPoly::one(), e_deg)];
    let mut q_parts = vec![LaurentVPoly::one()];
    for j in 1..order {
        let mut r = p[j].clone();
        for a in 1..j {
            if n_parts[a].is_zero() || q_parts[j - a].is_zero() {
                continue;
            }
            let prod = &n_parts[a] * &q_parts[j - a];
            r.add_mul_shifted(&prod, &VPoly::int(-1), 0);
        }
        let (low, high) = r.split_at(e_deg);
        n_parts.push(low);
        q_parts.push(high);
    }
    let small = ULaurent::from_t_major(&n_parts);
    let unit_factor = ULaurent::from_t_major(&q_parts);
    Ok(KernelData {
        kernel: k.clone(),
        cleared,
        e,
        small_factor: small,
        unit_factor,
        order,
    })
}

/// Substitutes a power series for `u` in a polynomial in `u` (Horner).
pub fn compose_u(p: &ULaurent, s: &TruncSeries) -> TruncSeries {
    assert!(p.is_polynomial(), "composition needs a polynomial in u");
    let Some((_, hi)) = p.span() else {
        return TruncSeries::zero(s.order());
    };
    let mut acc = TruncSeries::zero(EXACT);
    for k in (0..=hi).rev() {
        acc = &(&acc * s) + &p.coeff_u(k);
    }
    acc
}
