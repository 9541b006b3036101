//! Scalar abstraction and dense matrices over any exact (or float) scalar.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::algnum::RealCycNumber;

/// Ring elements with a decidable sign.
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn signum_exact(&self) -> i8;

    /// max(x, 0)
    fn pos_part(&self) -> Self {
        if self.signum_exact() > 0 {
            self.clone()
        } else {
            Self::zero()
        }
    }
}

pub trait FieldScalar: Scalar + Div<Output = Self> {}

impl Scalar for i64 {
    fn signum_exact(&self) -> i8 {
        self.signum() as i8
    }
}

impl Scalar for BigRational {
    fn signum_exact(&self) -> i8 {
        if self.is_zero() {
            0
        } else if self.is_positive() {
            1
        } else {
            -1
        }
    }
}
impl FieldScalar for BigRational {}

impl Scalar for f64 {
    fn signum_exact(&self) -> i8 {
        if *self == 0.0 {
            0
        } else if *self > 0.0 {
            1
        } else {
            -1
        }
    }
}
impl FieldScalar for f64 {}

impl Scalar for RealCycNumber {
    fn signum_exact(&self) -> i8 {
        self.sign()
    }
}
impl FieldScalar for RealCycNumber {}

/// Dense row-major matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, S::one());
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        assert!(rows.iter().all(|x| x.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn diag(v: &[S]) -> Self {
        let mut m = Self::zeros(v.len(), v.len());
        for (i, x) in v.iter().enumerate() {
            m.set(i, i, x.clone());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<S> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn col(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let v = out.get(i, j).clone() + a.clone() * b.clone();
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                (0..self.cols).fold(S::zero(), |acc, j| acc + self.get(i, j).clone() * v[j].clone())
            })
            .collect()
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j).clone() + other.get(i, j).clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j).clone() - other.get(i, j).clone())
    }

    pub fn neg(&self) -> Self {
        self.map(|x| -x.clone())
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|x| s.clone() * x.clone())
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self.get(rows[i], cols[j]).clone())
    }

    pub fn is_zero_matrix(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Every entry is >= 0, or every entry is <= 0.
    pub fn is_sign_coherent(&self) -> bool {
        let pos = self.data.iter().any(|x| x.signum_exact() > 0);
        let neg = self.data.iter().any(|x| x.signum_exact() < 0);
        !(pos && neg)
    }

    /// Sign of a sign-coherent matrix (0 for the zero matrix).
    pub fn coherent_sign(&self) -> Option<i8> {
        if !self.is_sign_coherent() {
            return None;
        }
        Some(self.data.iter().map(|x| x.signum_exact()).find(|&s| s != 0).unwrap_or(0))
    }

    pub fn is_skew_symmetric(&self) -> bool {
        self.rows == self.cols && self.transpose() == self.neg()
    }

    /// Sign-skew-symmetry: b_ij and b_ji have opposite signs or both vanish.
    pub fn is_sign_skew_symmetric(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| self.get(i, j).signum_exact() == -self.get(j, i).signum_exact())
            })
    }

    /// Copies `block` into position (r0, c0).
    pub fn set_block(&mut self, r0: usize, c0: usize, block: &Self) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j).clone());
            }
        }
    }
}

impl<S: FieldScalar> Matrix<S> {
    /// Gauss-Jordan inverse; None for singular matrices.
    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols, "inverse of a non-square matrix");
        let n = self.rows;
        let mut a = self.to_rows();
        let mut inv = Self::identity(n).to_rows();
        for col in 0..n {
            let piv = (col..n).find(|&r| a[r][col].signum_exact() != 0)?;
            a.swap(col, piv);
            inv.swap(col, piv);
            let p = a[col][col].clone();
            for j in 0..n {
                a[col][j] = a[col][j].clone() / p.clone();
                inv[col][j] = inv[col][j].clone() / p.clone();
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                for j in 0..n {
                    a[r][j] = a[r][j].clone() - f.clone() * a[col][j].clone();
                    inv[r][j] = inv[r][j].clone() - f.clone() * inv[col][j].clone();
                }
            }
        }
        Some(Self::from_rows(inv))
    }

    pub fn determinant(&self) -> S {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.to_rows();
        let mut det = S::one();
        for col in 0..n {
            let piv = match (col..n).find(|&r| a[r][col].signum_exact() != 0) {
                Some(p) => p,
                None => return S::zero(),
            };
            if piv != col {
                a.swap(col, piv);
                det = -det;
            }
            let p = a[col][col].clone();
            det = det * p.clone();
            for r in col + 1..n {
                if a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone() / p.clone();
                for j in col..n {
                    a[r][j] = a[r][j].clone() - f.clone() * a[col][j].clone();
                }
            }
        }
        det
    }
}

impl Matrix<i64> {
    pub fn to_rational(&self) -> Matrix<BigRational> {
        self.map(|&x| BigRational::from_integer(BigInt::from(x)))
    }

    /// Inverse of a unimodular integer matrix by unimodular row reduction.
    pub fn unimodular_inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a: Vec<Vec<i128>> = self.to_rows().iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
        let mut inv: Vec<Vec<i128>> =
            (0..n).map(|i| (0..n).map(|j| (i == j) as i128).collect()).collect();
        for col in 0..n {
            // Euclid on the column until a single nonzero entry at or below `col` remains
            loop {
                let nz: Vec<usize> = (col..n).filter(|&r| a[r][col] != 0).collect();
                if nz.is_empty() {
                    return None;
                }
                let p = *nz.iter().min_by_key(|&&r| a[r][col].abs()).unwrap();
                if nz.len() == 1 {
                    a.swap(col, p);
                    inv.swap(col, p);
                    break;
                }
                for &r in &nz {
                    if r == p {
                        continue;
                    }
                    let q = a[r][col].div_euclid(a[p][col]);
                    for j in 0..n {
                        a[r][j] -= q * a[p][j];
                        inv[r][j] -= q * inv[p][j];
                    }
                }
            }
            if a[col][col].abs() != 1 {
                return None;
            }
            if a[col][col] == -1 {
                for j in 0..n {
                    a[col][j] = -a[col][j];
                    inv[col][j] = -inv[col][j];
                }
            }
            for r in 0..n {
                if r != col && a[r][col] != 0 {
                    let q = a[r][col];
                    for j in 0..n {
                        a[r][j] -= q * a[col][j];
                        inv[r][j] -= q * inv[col][j];
                    }
                }
            }
        }
        let rows = inv
            .into_iter()
            .map(|r| r.into_iter().map(|x| i64::try_from(x).ok()).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>()?;
        Some(Self::from_rows(rows))
    }

    pub fn to_cyc(&self) -> Matrix<RealCycNumber> {
        self.map(|&x| RealCycNumber::from_rational(None, BigRational::from_integer(x.into())))
    }
}
