use std::fmt;
use std::ops::{Index, IndexMut, Mul, Sub};

use super::ulaurent::ULaurent;

/// Square matrix with [`ULaurent`] entries, row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct UMatrix {
    dim: usize,
    entries: Vec<ULaurent>,
}

impl UMatrix {
    pub fn zero(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        UMatrix {
            dim,
            entries: vec![ULaurent::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m[(i, i)] = ULaurent::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<ULaurent>>) -> Self {
        let dim = rows.len();
        assert!(dim > 0 && rows.iter().all(|r| r.len() == dim), "matrix must be square");
        UMatrix {
            dim,
            entries: rows.into_iter().flatten().collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[ULaurent] {
        &self.entries[i * self.dim..(i + 1) * self.dim]
    }

    pub fn row_sum(&self, i: usize) -> ULaurent {
        self.row(i).iter().fold(ULaurent::zero(), |acc, x| &acc + x)
    }

    /// The matrix with row `skip_row` and column `skip_col` removed.
    pub fn minor(&self, skip_row: usize, skip_col: usize) -> UMatrix {
        assert!(self.dim > 1, "a 1x1 matrix has no proper minor");
        let rows = (0..self.dim)
            .filter(|&i| i != skip_row)
            .map(|i| {
                (0..self.dim)
                    .filter(|&j| j != skip_col)
                    .map(|j| self[(i, j)].clone())
                    .collect()
            })
            .collect();
        UMatrix::from_rows(rows)
    }

    /// `x * self` for a row vector `x`.
    pub fn left_mul_vec(&self, x: &[ULaurent]) -> Vec<ULaurent> {
        assert_eq!(x.len(), self.dim);
        (0..self.dim)
            .map(|j| {
                (0..self.dim).fold(ULaurent::zero(), |acc, i| {
                    if x[i].is_zero() || self[(i, j)].is_zero() {
                        acc
                    } else {
                        &acc + &(&x[i] * &self[(i, j)])
                    }
                })
            })
            .collect()
    }

    /// `self * y` for a column vector `y`.
    pub fn mul_vec(&self, y: &[ULaurent]) -> Vec<ULaurent> {
        assert_eq!(y.len(), self.dim);
        (0..self.dim)
            .map(|i| {
                self.row(i).iter().zip(y).fold(ULaurent::zero(), |acc, (a, b)| {
                    if a.is_zero() || b.is_zero() {
                        acc
                    } else {
                        &acc + &(a * b)
                    }
                })
            })
            .collect()
    }

    pub fn map(&self, f: impl Fn(&ULaurent) -> ULaurent) -> UMatrix {
        UMatrix {
            dim: self.dim,
            entries: self.entries.iter().map(f).collect(),
        }
    }
}

impl Index<(usize, usize)> for UMatrix {
    type Output = ULaurent;
    fn index(&self, (i, j): (usize, usize)) -> &ULaurent {
        &self.entries[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for UMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut ULaurent {
        &mut self.entries[i * self.dim + j]
    }
}

impl Sub for &UMatrix {
    type Output = UMatrix;
    fn sub(self, rhs: &UMatrix) -> UMatrix {
        assert_eq!(self.dim, rhs.dim);
        UMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &UMatrix {
    type Output = UMatrix;
    fn mul(self, rhs: &UMatrix) -> UMatrix {
        assert_eq!(self.dim, rhs.dim);
        let n = self.dim;
        let mut out = UMatrix::zero(n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = ULaurent::zero();
                for k in 0..n {
                    if !self[(i, k)].is_zero() && !rhs[(k, j)].is_zero() {
                        acc = &acc + &(&self[(i, k)] * &rhs[(k, j)]);
                    }
                }
                out[(i, j)] = acc;
            }
        }
        out
    }
}

impl fmt::Display for UMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}
