//! Exact dense linear algebra over a field: row reduction, rank, nullspace,
//! linear solves, inverse and determinant.
//!
//! Matrices are row-major `Vec<Vec<T>>`. Every row of a matrix has the same
//! length; the column count is passed explicitly so that empty matrices work.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::{Rational, ScalarExpr};

pub type Matrix<T> = Vec<Vec<T>>;

pub trait Field: Clone + PartialEq {
    fn is_zero(&self) -> bool;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiplicative inverse; only called on nonzero values.
    fn inv(&self) -> Self;
    /// Pivot preference, smaller is better.
    fn cost(&self) -> usize {
        0
    }
    fn describe(&self) -> String;
}

impl Field for Rational {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        Rational::zero()
    }
    fn one_like(&self) -> Self {
        Rational::one()
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Self {
        self.recip()
    }
    fn cost(&self) -> usize {
        (self.numer().bits() + self.denom().bits()) as usize
    }
    fn describe(&self) -> String {
        crate::scalar::fmt_rational(self)
    }
}

impl Field for ScalarExpr {
    fn is_zero(&self) -> bool {
        ScalarExpr::is_zero(self)
    }
    fn zero_like(&self) -> Self {
        ScalarExpr::zero(self.chart())
    }
    fn one_like(&self) -> Self {
        ScalarExpr::one(self.chart())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Self {
        ScalarExpr::inv(self).expect("pivot is nonzero")
    }
    fn cost(&self) -> usize {
        self.numerator().num_terms() + 4 * (self.denominator().num_terms() - 1)
    }
    fn describe(&self) -> String {
        self.to_string()
    }
}

/// Reduced row echelon form in place; returns pivot columns in order.
pub fn rref<T: Field>(m: &mut Matrix<T>, ncols: usize) -> Vec<usize> {
    let nrows = m.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == nrows {
            break;
        }
        let Some(p) = (r..nrows)
            .filter(|&i| !m[i][c].is_zero())
            .min_by_key(|&i| m[i][c].cost())
        else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv();
        for j in c..ncols {
            if !m[r][j].is_zero() {
                m[r][j] = m[r][j].mul(&inv);
            }
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for j in c..ncols {
                if !pivot_row[j].is_zero() {
                    row[j] = row[j].sub(&f.mul(&pivot_row[j]));
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank<T: Field>(m: &Matrix<T>, ncols: usize) -> usize {
    let mut a = m.clone();
    rref(&mut a, ncols).len()
}

/// Basis of `{x : m x = 0}`; `zero` supplies the field's zero element.
pub fn nullspace<T: Field>(m: &Matrix<T>, ncols: usize, zero: &T) -> Matrix<T> {
    let mut a = m.clone();
    let pivots = rref(&mut a, ncols);
    let one = zero.one_like();
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![zero.clone(); ncols];
        v[free] = one.clone();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = a[r][free].neg();
        }
        basis.push(v);
    }
    basis
}

/// Some solution of `m x = b`, or `None` when the system is inconsistent.
pub fn solve<T: Field>(m: &Matrix<T>, ncols: usize, b: &[T], zero: &T) -> Option<Vec<T>> {
    let mut aug: Matrix<T> = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug, ncols + 1);
    if pivots.last() == Some(&ncols) {
        return None;
    }
    let mut x = vec![zero.clone(); ncols];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[r][ncols].clone();
    }
    Some(x)
}

/// Determinant by elimination.
pub fn det<T: Field>(m: &Matrix<T>, zero: &T) -> T {
    let n = m.len();
    let mut a = m.clone();
    let mut acc = zero.one_like();
    for c in 0..n {
        let Some(p) = (c..n)
            .filter(|&i| !a[i][c].is_zero())
            .min_by_key(|&i| a[i][c].cost())
        else {
            return zero.clone();
        };
        if p != c {
            a.swap(p, c);
            acc = acc.neg();
        }
        acc = acc.mul(&a[c][c]);
        let inv = a[c][c].inv();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = a[i][c].mul(&inv);
            for j in c..n {
                if !a[c][j].is_zero() {
                    a[i][j] = a[i][j].sub(&f.mul(&a[c][j]));
                }
            }
        }
    }
    acc
}

/// Gauss–Jordan inverse; `NotInvertible` carries the determinant.
pub fn inverse<T: Field>(m: &Matrix<T>, zero: &T) -> Result<Matrix<T>> {
    let n = m.len();
    let one = zero.one_like();
    let mut aug: Matrix<T> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { one.clone() } else { zero.clone() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug, 2 * n);
    if pivots.len() < n || pivots[n - 1] >= n {
        return Err(Error::NotInvertible {
            det: det(m, zero).describe(),
        });
    }
    Ok(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn mat_mul<T: Field>(a: &Matrix<T>, b: &Matrix<T>, zero: &T) -> Matrix<T> {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = zero.clone();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            acc = acc.add(&row[k].mul(&b[k][j]));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn transpose<T: Clone>(a: &Matrix<T>, ncols: usize) -> Matrix<T> {
    (0..ncols).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn eval_matrix(m: &Matrix<ScalarExpr>, point: &[Rational]) -> Result<Matrix<Rational>> {
    m.iter()
        .map(|row| row.iter().map(|e| e.eval(point)).collect())
        .collect()
}

pub fn identity<T: Field>(n: usize, zero: &T) -> Matrix<T> {
    let one = zero.one_like();
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { one.clone() } else { zero.clone() }).collect())
        .collect()
}

/// Whether the rows of `a` and `b` span the same subspace of `T^ncols`.
pub fn same_row_span<T: Field>(a: &Matrix<T>, b: &Matrix<T>, ncols: usize) -> bool {
    let ra = rank(a, ncols);
    if ra != rank(b, ncols) {
        return false;
    }
    let stacked: Matrix<T> = a.iter().chain(b.iter()).cloned().collect();
    rank(&stacked, ncols) == ra
}

/// Basis of the row span (nonzero rows of the reduced echelon form).
pub fn row_basis<T: Field>(m: &Matrix<T>, ncols: usize) -> Matrix<T> {
    let mut r = m.clone();
    let k = rref(&mut r, ncols).len();
    r.truncate(k);
    r
}
