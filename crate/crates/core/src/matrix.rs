//! Small dense matrices over a [`Scalar`], enough for linear representations
//! and state-affine recursions of modest dimension.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, PartialEq)]
pub struct Matrix<C> {
    rows: usize,
    cols: usize,
    data: Vec<C>,
}

impl<C: Scalar> Matrix<C> {
    pub fn zeros(rows: usize, cols: usize) -> Matrix<C> {
        Matrix { rows, cols, data: vec![C::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Matrix<C> {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<C>>) -> Result<Matrix<C>> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            if row.len() != c {
                return Err(Error::DimensionMismatch { expected: c, found: row.len() });
            }
            data.extend(row);
        }
        Ok(Matrix { rows: r, cols: c, data })
    }

    pub fn column(v: Vec<C>) -> Matrix<C> {
        Matrix { rows: v.len(), cols: 1, data: v }
    }

    pub fn row(v: Vec<C>) -> Matrix<C> {
        Matrix { rows: 1, cols: v.len(), data: v }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|c| c.is_zero())
    }

    pub fn to_rows(&self) -> Vec<Vec<C>> {
        self.data.chunks(self.cols.max(1)).take(self.rows).map(<[C]>::to_vec).collect()
    }

    pub fn mul(&self, other: &Matrix<C>) -> Result<Matrix<C>> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch { expected: self.cols, found: other.rows });
        }
        let mut out: Matrix<C> = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] = out[(i, j)].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &Matrix<C>) -> Result<Matrix<C>> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::DimensionMismatch { expected: self.rows * self.cols, found: other.rows * other.cols });
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a.clone() + b.clone()).collect();
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn sub(&self, other: &Matrix<C>) -> Result<Matrix<C>> {
        self.add(&other.scale(&-C::one()))
    }

    pub fn scale(&self, k: &C) -> Matrix<C> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|a| a.clone() * k.clone()).collect() }
    }

    pub fn kron(&self, other: &Matrix<C>) -> Matrix<C> {
        let mut out = Matrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = &self[(i, j)];
                if a.is_zero() {
                    continue;
                }
                for p in 0..other.rows {
                    for q in 0..other.cols {
                        out[(i * other.rows + p, j * other.cols + q)] = a.clone() * other[(p, q)].clone();
                    }
                }
            }
        }
        out
    }

    /// Places `blocks[i][j]` into a block matrix; `None` blocks are zero.
    pub fn block(row_sizes: &[usize], col_sizes: &[usize], blocks: &[Vec<Option<&Matrix<C>>>]) -> Matrix<C> {
        let rows = row_sizes.iter().sum();
        let cols = col_sizes.iter().sum();
        let mut out = Matrix::zeros(rows, cols);
        let mut r0 = 0;
        for (bi, brow) in blocks.iter().enumerate() {
            let mut c0 = 0;
            for (bj, b) in brow.iter().enumerate() {
                if let Some(b) = b {
                    for i in 0..b.rows {
                        for j in 0..b.cols {
                            out[(r0 + i, c0 + j)] = b[(i, j)].clone();
                        }
                    }
                }
                c0 += col_sizes[bj];
            }
            r0 += row_sizes[bi];
        }
        out
    }

    /// Induced 1-norm: largest absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].to_float().abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Induced 1-norm computed in the coefficient ring.
    pub fn norm1_exact(&self) -> C {
        let mut best = C::zero();
        for j in 0..self.cols {
            let mut s = C::zero();
            for i in 0..self.rows {
                s = s + self[(i, j)].abs_value();
            }
            if s > best {
                best = s;
            }
        }
        best
    }

    /// Solves `self * X = rhs` by Gaussian elimination with pivoting on the
    /// largest magnitude; `None` when singular.
    pub fn solve(&self, rhs: &Matrix<C>) -> Option<Matrix<C>> {
        assert_eq!(self.rows, self.cols, "solve needs a square matrix");
        assert_eq!(rhs.rows, self.rows);
        let n = self.rows;
        let mut a = self.clone();
        let mut b = rhs.clone();
        for col in 0..n {
            let pivot = (col..n)
                .filter(|&r| !a[(r, col)].is_zero())
                .max_by(|&r, &s| a[(r, col)].abs_value().partial_cmp(&a[(s, col)].abs_value()).unwrap_or(std::cmp::Ordering::Equal))?;
            if !C::EXACT && a[(pivot, col)].to_float().abs() < 1e-300 {
                return None;
            }
            a.swap_rows(pivot, col);
            b.swap_rows(pivot, col);
            let inv = a[(col, col)].recip()?;
            for k in col..n {
                a[(col, k)] = a[(col, k)].clone() * inv.clone();
            }
            for k in 0..b.cols {
                b[(col, k)] = b[(col, k)].clone() * inv.clone();
            }
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let f = a[(r, col)].clone();
                for k in col..n {
                    a[(r, k)] = a[(r, k)].clone() - f.clone() * a[(col, k)].clone();
                }
                for k in 0..b.cols {
                    b[(r, k)] = b[(r, k)].clone() - f.clone() * b[(col, k)].clone();
                }
            }
        }
        Some(b)
    }

    pub fn inverse(&self) -> Option<Matrix<C>> {
        self.solve(&Matrix::identity(self.rows))
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.cols {
            self.data.swap(a * self.cols + k, b * self.cols + k);
        }
    }

    pub fn map<D: Scalar>(&self, f: impl Fn(&C) -> D) -> Matrix<D> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn entries(&self) -> &[C] {
        &self.data
    }
}

impl<C> std::ops::Index<(usize, usize)> for Matrix<C> {
    type Output = C;

    fn index(&self, (i, j): (usize, usize)) -> &C {
        &self.data[i * self.cols + j]
    }
}

impl<C> std::ops::IndexMut<(usize, usize)> for Matrix<C> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C {
        &mut self.data[i * self.cols + j]
    }
}

impl<C: fmt::Display> fmt::Debug for Matrix<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .data
            .chunks(self.cols.max(1))
            .take(self.rows)
            .map(|r| r.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", "))
            .collect();
        write!(f, "[{}]", rows.join("; "))
    }
}
