//! Generating functions of walks, bridges, meanders and excursions.
//!
//! Two routes compute the same objects. Iteration solves
//! `W = e_1 + W A` and `M = e_1 + M A - {u^<0}(M A)` one power of `t` at a
//! time. The closed forms divide by the kernel:
//! `W = e_1 adj(I - A) 1 / K` and `M = G N / (u^e K)`, where `N` is the
//! small factor and `G = Phi / N` comes from the boundary polynomial `Phi`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::algebra::{LaurentVPoly, Rational, TruncSeries, ULaurent, UMatrix, VPoly};
use crate::error::{Error, Result};
use crate::kernel::{adjugate, autocorrelation_vector, determinant, kernel_matrix, small_factor, KernelData};

/// The four path classes.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Class {
    /// Walks: no constraint on altitude.
    W,
    /// Bridges: walks ending at altitude 0.
    B,
    /// Meanders: never below altitude 0.
    M,
    /// Excursions: meanders ending at altitude 0.
    E,
}

impl Class {
    pub const ALL: [Class; 4] = [Class::W, Class::B, Class::M, Class::E];

    pub fn is_meander(self) -> bool {
        matches!(self, Class::M | Class::E)
    }

    pub fn ends_at_zero(self) -> bool {
        matches!(self, Class::B | Class::E)
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Class::W => "W",
            Class::B => "B",
            Class::M => "M",
            Class::E => "E",
        };
        f.write_str(s)
    }
}

impl FromStr for Class {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "W" | "w" => Ok(Class::W),
            "B" | "b" => Ok(Class::B),
            "M" | "m" => Ok(Class::M),
            "E" | "e" => Ok(Class::E),
            _ => Err(Error::InvalidConfig(format!(
                "unknown class `{s}` (expected W, B, M or E)"
            ))),
        }
    }
}

/// One monomial `coeff * t^len * u^alt` of the adjacency entry `(from, to)`.
#[derive(Clone, Debug)]
struct WeightTerm {
    from: usize,
    to: usize,
    len: usize,
    alt: i64,
    coeff: VPoly,
}

fn weight_terms(adj: &UMatrix) -> Vec<WeightTerm> {
    let n = adj.dim();
    let mut out = Vec::new();
    for from in 0..n {
        for to in 0..n {
            for (alt, series) in adj[(from, to)].terms() {
                assert!(series.is_exact(), "adjacency entries must be exact");
                for (len, c) in series.coeffs().iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    assert!(len > 0, "adjacency entries must vanish at t = 0");
                    out.push(WeightTerm {
                        from,
                        to,
                        len,
                        alt,
                        coeff: c.clone(),
                    });
                }
            }
        }
    }
    out
}

/// One `t`-slice per state: `next[j] = sum_i prev_i * A_ij`, optionally
/// dropping negative altitudes.
fn next_slice<'a>(
    terms: &[WeightTerm],
    states: usize,
    n: usize,
    history: impl Fn(usize, usize) -> Option<&'a LaurentVPoly>,
    meander: bool,
) -> Vec<LaurentVPoly> {
    let mut next = vec![LaurentVPoly::zero(); states];
    if n == 0 {
        next[0] = LaurentVPoly::one();
        return next;
    }
    for w in terms {
        if w.len > n {
            continue;
        }
        if let Some(prev) = history(w.from, n - w.len) {
            next[w.to].add_mul_shifted(prev, &w.coeff, w.alt);
        }
    }
    if meander {
        for s in &mut next {
            s.clip(0, i64::MAX);
        }
    }
    next
}

fn iterate(adj: &UMatrix, order: usize, meander: bool) -> Vec<ULaurent> {
    let terms = weight_terms(adj);
    let states = adj.dim();
    let mut slices: Vec<Vec<LaurentVPoly>> = Vec::with_capacity(order);
    for n in 0..order {
        let next = next_slice(&terms, states, n, |i, m| Some(&slices[m][i]), meander);
        slices.push(next);
    }
    (0..states)
        .map(|i| {
            let column: Vec<LaurentVPoly> = slices.iter().map(|s| s[i].clone()).collect();
            ULaurent::from_t_major(&column).truncate_t(order)
        })
        .collect()
}

/// Walk generating functions per final state, to `t`-order `order`.
pub fn iterate_walks(adj: &UMatrix, order: usize) -> Vec<ULaurent> {
    iterate(adj, order, false)
}

/// Meander generating functions per final state, to `t`-order `order`.
pub fn iterate_meanders(adj: &UMatrix, order: usize) -> Vec<ULaurent> {
    iterate(adj, order, true)
}

/// The series of one class to `t`-order `order`, keeping only a window of
/// recent slices. `W` and `M` are evaluated at `u = 1`. For `B` and `E`,
/// altitudes that can no longer return to 0 are discarded.
pub fn class_series_streaming(adj: &UMatrix, class: Class, order: usize) -> TruncSeries {
    let terms = weight_terms(adj);
    let bounds = ReturnBounds::new(&terms, order);
    match int_terms(&terms) {
        Some(ints) => stream_integer(&ints, adj.dim(), class, order, &bounds),
        None => stream_rational(&terms, adj.dim(), class, order, &bounds),
    }
}

/// Altitude window from which altitude 0 is still reachable.
struct ReturnBounds {
    down: (i128, i128),
    up: (i128, i128),
    last: i128,
}

impl ReturnBounds {
    fn new(terms: &[WeightTerm], order: usize) -> Self {
        // Fastest descent and ascent per unit length, as fractions.
        let rate = |sign: i64| {
            terms
                .iter()
                .filter(|w| w.alt * sign > 0)
                .map(|w| ((w.alt * sign) as i128, w.len as i128))
                .fold(
                    (0i128, 1i128),
                    |(a, b), (c, d)| if c * b > a * d { (c, d) } else { (a, b) },
                )
        };
        ReturnBounds {
            down: rate(-1),
            up: rate(1),
            last: order.saturating_sub(1) as i128,
        }
    }

    fn at(&self, n: usize) -> (i64, i64) {
        let rest = self.last - n as i128;
        let hi = (rest * self.down.0).div_euclid(self.down.1) as i64;
        let lo = -(rest * self.up.0).div_euclid(self.up.1) as i64;
        (lo, hi)
    }
}

fn window(terms: &[WeightTerm]) -> usize {
    terms.iter().map(|w| w.len).max().unwrap_or(1)
}

fn stream_rational(
    terms: &[WeightTerm],
    states: usize,
    class: Class,
    order: usize,
    bounds: &ReturnBounds,
) -> TruncSeries {
    let window = window(terms);
    let one = Rational::from_integer(1.into());
    let mut ring: Vec<Vec<LaurentVPoly>> = Vec::with_capacity(window);
    let mut out = Vec::with_capacity(order);
    for n in 0..order {
        let mut next = next_slice(
            terms,
            states,
            n,
            |i, m| (n - m <= ring.len()).then(|| &ring[ring.len() - (n - m)][i]),
            class.is_meander(),
        );
        if class.ends_at_zero() {
            let (lo, hi) = bounds.at(n);
            for s in &mut next {
                s.clip(lo, hi);
            }
        }
        let total = next.iter().fold(VPoly::zero(), |mut acc, s| {
            if class.ends_at_zero() {
                acc += &s.coeff(0);
            } else {
                acc += &s.eval_u(&one);
            }
            acc
        });
        out.push(total);
        if ring.len() == window {
            ring.remove(0);
        }
        ring.push(next);
    }
    TruncSeries::from_coeffs(out, order)
}

/// A weight term whose coefficient is an integer polynomial in `v`.
struct IntTerm {
    from: usize,
    to: usize,
    len: usize,
    alt: i64,
    coeff: Vec<(BigInt, usize)>,
}

fn int_terms(terms: &[WeightTerm]) -> Option<Vec<IntTerm>> {
    terms
        .iter()
        .map(|w| {
            let coeff = w
                .coeff
                .coeffs()
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(k, c)| c.is_integer().then(|| (c.to_integer(), k)))
                .collect::<Option<Vec<_>>>()?;
            Some(IntTerm {
                from: w.from,
                to: w.to,
                len: w.len,
                alt: w.alt,
                coeff,
            })
        })
        .collect()
}

/// Integer slice: `rows[h - min]` holds the `v`-coefficients at altitude `h`.
#[derive(Clone, Default)]
struct IntSlice {
    min: i64,
    rows: Vec<Vec<BigInt>>,
}

impl IntSlice {
    fn unit() -> Self {
        IntSlice {
            min: 0,
            rows: vec![vec![BigInt::one()]],
        }
    }

    /// `self += c * v^k * u^shift * other`.
    fn add_shifted(&mut self, other: &IntSlice, c: &BigInt, k: usize, shift: i64) {
        if other.rows.is_empty() {
            return;
        }
        let lo = other.min + shift;
        let hi = lo + other.rows.len() as i64 - 1;
        if self.rows.is_empty() {
            self.min = lo;
        }
        if lo < self.min {
            let pad = (self.min - lo) as usize;
            self.rows.splice(0..0, std::iter::repeat_with(Vec::new).take(pad));
            self.min = lo;
        }
        let top = self.min + self.rows.len() as i64 - 1;
        if hi > top {
            self.rows.resize_with(self.rows.len() + (hi - top) as usize, Vec::new);
        }
        let base = (lo - self.min) as usize;
        let unit = c.is_one();
        for (src, dst) in other.rows.iter().zip(&mut self.rows[base..]) {
            if src.is_empty() {
                continue;
            }
            if dst.len() < src.len() + k {
                dst.resize(src.len() + k, BigInt::zero());
            }
            for (d, s) in dst[k..].iter_mut().zip(src) {
                if unit {
                    *d += s;
                } else {
                    *d += s * c;
                }
            }
        }
    }

    fn clip(&mut self, lo: i64, hi: i64) {
        let top = self.min + self.rows.len() as i64 - 1;
        if hi < top {
            self.rows.truncate((hi - self.min + 1).max(0) as usize);
        }
        if lo > self.min {
            let drop = ((lo - self.min) as usize).min(self.rows.len());
            self.rows.drain(..drop);
            self.min = lo;
        }
    }

    fn add_row_to(&self, h: i64, acc: &mut Vec<BigInt>) {
        if h < self.min {
            return;
        }
        if let Some(row) = self.rows.get((h - self.min) as usize) {
            add_row(acc, row);
        }
    }

    fn add_all_to(&self, acc: &mut Vec<BigInt>) {
        for row in &self.rows {
            add_row(acc, row);
        }
    }
}

fn add_row(acc: &mut Vec<BigInt>, row: &[BigInt]) {
    if acc.len() < row.len() {
        acc.resize(row.len(), BigInt::zero());
    }
    for (a, r) in acc.iter_mut().zip(row) {
        *a += r;
    }
}

fn stream_integer(terms: &[IntTerm], states: usize, class: Class, order: usize, bounds: &ReturnBounds) -> TruncSeries {
    let window = terms.iter().map(|w| w.len).max().unwrap_or(1);
    let mut ring: Vec<Vec<IntSlice>> = Vec::with_capacity(window);
    let mut out = Vec::with_capacity(order);
    for n in 0..order {
        let mut next = vec![IntSlice::default(); states];
        if n == 0 {
            next[0] = IntSlice::unit();
        }
        for w in terms {
            if w.len > n || w.len > ring.len() {
                continue;
            }
            let prev = &ring[ring.len() - w.len][w.from];
            for (c, k) in &w.coeff {
                next[w.to].add_shifted(prev, c, *k, w.alt);
            }
        }
        if class.is_meander() {
            for s in &mut next {
                s.clip(0, i64::MAX);
            }
        }
        let mut total = Vec::new();
        if class.ends_at_zero() {
            let (lo, hi) = bounds.at(n);
            for s in &mut next {
                s.clip(lo, hi);
                s.add_row_to(0, &mut total);
            }
        } else {
            for s in &next {
                s.add_all_to(&mut total);
            }
        }
        out.push(VPoly::from_coeffs(
            total.into_iter().map(Rational::from_integer).collect(),
        ));
        if ring.len() == window {
            ring.remove(0);
        }
        ring.push(next);
    }
    TruncSeries::from_coeffs(out, order)
}

/// `W = (e_1 adj(I - A) 1) / K`, each state separately.
pub fn closed_form_walk_vector(adj: &UMatrix, kd: &KernelData, order: usize) -> Result<Vec<ULaurent>> {
    let inv = invert_kernel(&kd.kernel, order)?;
    let cof = adjugate(&kernel_matrix(adj));
    Ok(cof.row(0).iter().map(|x| (x * &inv).truncate_t(order)).collect())
}

/// `W(t,u) = (e_1 adj(I - A) 1) / K(t,u)`.
pub fn closed_form_walks(adj: &UMatrix, kd: &KernelData, order: usize) -> Result<ULaurent> {
    let inv = invert_kernel(&kd.kernel, order)?;
    let numerator = adjugate(&kernel_matrix(adj)).row_sum(0);
    Ok((&numerator * &inv).truncate_t(order))
}

fn invert_kernel(k: &ULaurent, order: usize) -> Result<ULaurent> {
    k.invert_series(order).map_err(|e| match e {
        Error::NotAUnit => Error::DegenerateKernel,
        other => other,
    })
}

/// The boundary data of the meander system.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BoundaryData {
    /// `F = e_1 - {u^<0}(M A)`, one entry per state.
    pub forbidden_vector: Vec<ULaurent>,
    /// `Phi = u^e F adj(I - A) 1`, a polynomial in `u`.
    pub phi: ULaurent,
    /// `G = Phi / N`.
    pub g: ULaurent,
    pub order: usize,
}

/// Computes `F`, `Phi` and `G` from a meander vector. Fails with
/// `NonzeroRemainder` when `Phi` is not a polynomial multiple of the small
/// factor.
pub fn boundary_data(adj: &UMatrix, kd: &KernelData, meanders: &[ULaurent]) -> Result<BoundaryData> {
    let order = meanders
        .iter()
        .map(ULaurent::order)
        .min()
        .unwrap_or(kd.order)
        .min(kd.order);
    let ma = adj.left_mul_vec(meanders);
    let forbidden_vector: Vec<ULaurent> = ma
        .iter()
        .enumerate()
        .map(|(j, x)| {
            let unit = if j == 0 { ULaurent::one() } else { ULaurent::zero() };
            (&unit - &x.negative_part()).truncate_t(order)
        })
        .collect();
    let vvec = autocorrelation_vector(&kernel_matrix(adj));
    let phi = forbidden_vector
        .iter()
        .zip(&vvec)
        .fold(ULaurent::zero(), |acc, (f, v)| &acc + &(f * v))
        .mul_u_pow(kd.e as i64)
        .truncate_t(order);
    if !phi.is_polynomial() {
        return Err(Error::NonzeroRemainder(format!("Phi has negative powers of u: {phi}")));
    }
    let (g, rem) = phi.div_rem_monic(&kd.small_factor);
    let rem = rem.truncate_t(order);
    if !rem.is_zero() {
        return Err(Error::NonzeroRemainder(rem.to_string()));
    }
    Ok(BoundaryData {
        forbidden_vector,
        phi,
        g: g.truncate_t(order),
        order,
    })
}

/// `M(t,u) = G N / (u^e K)`.
pub fn closed_form_meanders(kd: &KernelData, bd: &BoundaryData, order: usize) -> Result<ULaurent> {
    let order = order.min(bd.order);
    let inv = invert_kernel(&kd.cleared, order)?;
    let numerator = &bd.g * &kd.small_factor;
    Ok((&numerator * &inv).truncate_t(order))
}

/// `M_i = (F adj(I - A))_i / K`, each state separately.
pub fn closed_form_meander_vector(
    adj: &UMatrix,
    kd: &KernelData,
    bd: &BoundaryData,
    order: usize,
) -> Result<Vec<ULaurent>> {
    let order = order.min(bd.order);
    let inv = invert_kernel(&kd.kernel, order)?;
    let cof = adjugate(&kernel_matrix(adj));
    Ok(cof
        .left_mul_vec(&bd.forbidden_vector)
        .iter()
        .map(|x| (x * &inv).truncate_t(order))
        .collect())
}

/// Generating functions of all four classes.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GfBundle {
    pub walk_vector: Vec<ULaurent>,
    pub meander_vector: Vec<ULaurent>,
    pub w: ULaurent,
    pub m: ULaurent,
    pub b: TruncSeries,
    pub e: TruncSeries,
    pub order: usize,
}

/// Everything the closed-form route produces.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ClosedForm {
    pub bundle: GfBundle,
    pub kernel: KernelData,
    pub boundary: BoundaryData,
}

impl GfBundle {
    fn assemble(
        walk_vector: Vec<ULaurent>,
        meander_vector: Vec<ULaurent>,
        w: ULaurent,
        m: ULaurent,
        order: usize,
    ) -> Self {
        let b = w.coeff_u(0).truncate(order);
        let e = m.coeff_u(0).truncate(order);
        GfBundle {
            walk_vector,
            meander_vector,
            w,
            m,
            b,
            e,
            order,
        }
    }

    /// The iteration route.
    pub fn iterate(adj: &UMatrix, order: usize) -> Self {
        let walks = iterate_walks(adj, order);
        let meanders = iterate_meanders(adj, order);
        let w = sum(&walks).truncate_t(order);
        let m = sum(&meanders).truncate_t(order);
        Self::assemble(walks, meanders, w, m, order)
    }

    /// The kernel route. The boundary unknowns are read off the iterated
    /// meander vector; everything else goes through the kernel.
    pub fn closed_form(adj: &UMatrix, order: usize) -> Result<ClosedForm> {
        let kernel = small_factor(&determinant(&kernel_matrix(adj)), order)?;
        let iterated = iterate_meanders(adj, order);
        let boundary = boundary_data(adj, &kernel, &iterated)?;
        let walk_vector = closed_form_walk_vector(adj, &kernel, order)?;
        let w = closed_form_walks(adj, &kernel, order)?;
        let meander_vector = closed_form_meander_vector(adj, &kernel, &boundary, order)?;
        let m = closed_form_meanders(&kernel, &boundary, order)?;
        Ok(ClosedForm {
            bundle: Self::assemble(walk_vector, meander_vector, w, m, order),
            kernel,
            boundary,
        })
    }

    /// `W` and `M` at `u = r`, `B`, `E`.
    pub fn class_at(&self, class: Class, u: &Rational) -> TruncSeries {
        match class {
            Class::W => self.w.eval_u(u).truncate(self.order),
            Class::M => self.m.eval_u(u).truncate(self.order),
            Class::B => self.b.clone(),
            Class::E => self.e.clone(),
        }
    }

    /// `W(t,1)`, `B(t)`, `M(t,1)`, `E(t)`.
    pub fn class(&self, class: Class) -> TruncSeries {
        self.class_at(class, &Rational::from_integer(1.into()))
    }
}

fn sum(xs: &[ULaurent]) -> ULaurent {
    xs.iter().fold(ULaurent::zero(), |acc, x| &acc + x)
}

/// `h_n(v)`, the coefficient of `t^n`.
pub fn distribution_table(series: &TruncSeries, n: usize) -> Result<VPoly> {
    series.try_coeff(n).cloned()
}

/// Re-indexes `t^(2n)` as `x^n`. Every odd coefficient must vanish.
pub fn substitute_semilength(s: &TruncSeries) -> Result<TruncSeries> {
    for (i, c) in s.coeffs().iter().enumerate() {
        if i % 2 == 1 && !c.is_zero() {
            return Err(Error::OddCoefficientPresent(i));
        }
    }
    let order = if s.is_exact() { s.order() } else { s.order().div_ceil(2) };
    let coeffs = s.coeffs().iter().step_by(2).cloned().collect();
    Ok(TruncSeries::from_coeffs(coeffs, order))
}
