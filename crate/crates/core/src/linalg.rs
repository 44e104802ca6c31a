//! Small dense matrices over the rationals. Sizes here are at most a few
//! dozen (number of partitions of a low degree), so plain Gaussian
//! elimination is all that is needed.

use std::ops::Mul;

use num::{One, Signed, Zero};

use crate::error::{QtError, Result};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Rational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, data: vec![Rational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::one();
        }
        m
    }

    pub fn diagonal(entries: &[Rational]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (i, e) in entries.iter().enumerate() {
            m[(i, i)] = e.clone();
        }
        m
    }

    /// Builds a matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(rows: usize, columns: &[Vec<Rational>]) -> Self {
        let mut m = Self::zeros(rows, columns.len());
        for (j, col) in columns.iter().enumerate() {
            assert_eq!(col.len(), rows, "column {j} has the wrong length");
            for (i, x) in col.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn scale(&self, c: &Rational) -> Self {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| x * c).collect(),
        }
    }

    pub fn sub(&self, other: &RatMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn apply(&self, x: &[Rational]) -> Vec<Rational> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(Rational::zero(), |acc, j| {
                    if x[j].is_zero() {
                        acc
                    } else {
                        acc + &self[(i, j)] * &x[j]
                    }
                })
            })
            .collect()
    }

    pub fn trace(&self) -> Rational {
        (0..self.rows.min(self.cols)).fold(Rational::zero(), |acc, i| acc + &self[(i, i)])
    }

    /// Largest entry-wise absolute difference; matrices must share a shape.
    pub fn max_abs_diff(&self, other: &RatMatrix) -> Rational {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    pub fn determinant(&self) -> Result<Rational> {
        self.require_square()?;
        let n = self.rows;
        let mut a = self.clone();
        let mut det = Rational::one();
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !a[(r, col)].is_zero()) else {
                return Ok(Rational::zero());
            };
            if piv != col {
                a.swap_rows(piv, col);
                det = -det;
            }
            let p = a[(col, col)].clone();
            det *= &p;
            for r in col + 1..n {
                if a[(r, col)].is_zero() {
                    continue;
                }
                let f = &a[(r, col)] / &p;
                for k in col..n {
                    let sub = &f * &a[(col, k)];
                    a[(r, k)] -= sub;
                }
            }
        }
        Ok(det)
    }

    /// Exact inverse by Gauss–Jordan elimination.
    pub fn inverse(&self) -> Result<Self> {
        self.require_square()?;
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for col in 0..n {
            let piv = (col..n)
                .find(|&r| !a[(r, col)].is_zero())
                .ok_or_else(|| QtError::DivisionByZero("singular matrix".into()))?;
            a.swap_rows(piv, col);
            inv.swap_rows(piv, col);
            let p = a[(col, col)].recip();
            for k in 0..n {
                a[(col, k)] *= &p;
                inv[(col, k)] *= &p;
            }
            for r in 0..n {
                if r == col || a[(r, col)].is_zero() {
                    continue;
                }
                let f = a[(r, col)].clone();
                for k in 0..n {
                    let s1 = &f * &a[(col, k)];
                    a[(r, k)] -= s1;
                    let s2 = &f * &inv[(col, k)];
                    inv[(r, k)] -= s2;
                }
            }
        }
        Ok(inv)
    }

    fn require_square(&self) -> Result<()> {
        if self.rows == self.cols {
            Ok(())
        } else {
            Err(QtError::SizeMismatch { left: self.rows, right: self.cols })
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for k in 0..self.cols {
            self.data.swap(a * self.cols + k, b * self.cols + k);
        }
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for RatMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul<&RatMatrix> for &RatMatrix {
    type Output = RatMatrix;
    fn mul(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in product");
        let mut out = RatMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn m(rows: &[&[i64]]) -> RatMatrix {
        let cols = rows[0].len();
        let mut out = RatMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            for (j, &x) in r.iter().enumerate() {
                out[(i, j)] = int(x);
            }
        }
        out
    }

    #[test]
    fn inverse_and_determinant() {
        let a = m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        assert_eq!(a.determinant().unwrap(), int(18));
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, RatMatrix::identity(3));
        assert_eq!(inv[(0, 0)], rat(11, 18));
    }

    #[test]
    fn singular_matrices() {
        let s = m(&[&[1, 2], &[2, 4]]);
        assert_eq!(s.determinant().unwrap(), int(0));
        assert!(s.inverse().is_err());
        assert!(m(&[&[1, 2, 3]]).determinant().is_err());
    }

    #[test]
    fn pivoting_needed() {
        let a = m(&[&[0, 1], &[1, 0]]);
        assert_eq!(a.determinant().unwrap(), int(-1));
        assert_eq!(a.inverse().unwrap(), a);
    }
}
