//! Small dense matrices over a [`Real`] scalar.
//!
//! Dimensions in this crate are desk-scale (a few dozen at most), so the
//! routines here favour clarity over blocking or SIMD.

use std::ops::{Add, Index, IndexMut, Mul, Neg, Sub};

use num_complex::Complex;

use crate::scalar::Real;

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Real> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_diagonal(diag: &[T]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from row vectors. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Self { rows: r, cols: c, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Assembles `[[a, b], [c, d]]` from four blocks of matching shapes.
    pub fn from_blocks(a: &Self, b: &Self, c: &Self, d: &Self) -> Self {
        assert_eq!(a.rows, b.rows);
        assert_eq!(c.rows, d.rows);
        assert_eq!(a.cols, c.cols);
        assert_eq!(b.cols, d.cols);
        let (top, left) = (a.rows, a.cols);
        Self::from_fn(a.rows + c.rows, a.cols + b.cols, |i, j| match (i < top, j < left) {
            (true, true) => a[(i, j)],
            (true, false) => b[(i, j - left)],
            (false, true) => c[(i - top, j)],
            (false, false) => d[(i - top, j - left)],
        })
    }

    /// Extracts the `rows x cols` block whose top-left corner is `(r0, c0)`.
    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(&a, &b)| a * b).sum())
            .collect()
    }

    /// `u^T M v`.
    pub fn bilinear(&self, u: &[T], v: &[T]) -> T {
        assert_eq!(self.rows, u.len());
        u.iter().zip(self.mul_vec(v)).map(|(&a, b)| a * b).sum()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, &x| m.max(x.abs()))
    }

    /// Largest entrywise deviation; infinite when shapes differ.
    pub fn max_abs_diff(&self, other: &Self) -> T {
        if self.rows != other.rows || self.cols != other.cols {
            return T::infinity();
        }
        self.data
            .iter()
            .zip(&other.data)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }

    pub fn symmetry_residual(&self) -> T {
        self.max_abs_diff(&self.transpose())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    /// Returns `None` for non-square or numerically singular input.
    pub fn inverse(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        let scale = self.max_abs();
        if scale == T::zero() {
            return None;
        }
        let singular = scale * T::epsilon() * T::from_count(n.max(1));
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| {
                    a[(x, col)]
                        .abs()
                        .partial_cmp(&a[(y, col)].abs())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap_or(col);
            if !(a[(pivot, col)].abs() > singular) {
                return None;
            }
            if pivot != col {
                a.swap_rows(pivot, col);
                inv.swap_rows(pivot, col);
            }
            let d = a[(col, col)];
            for j in 0..n {
                a[(col, j)] /= d;
                inv[(col, j)] /= d;
            }
            for i in 0..n {
                if i == col {
                    continue;
                }
                let f = a[(i, col)];
                if f == T::zero() {
                    continue;
                }
                for j in 0..n {
                    let (ac, ic) = (a[(col, j)], inv[(col, j)]);
                    a[(i, j)] -= f * ac;
                    inv[(i, j)] -= f * ic;
                }
            }
        }
        Some(inv)
    }

    /// Lower-triangular Cholesky factor; `None` unless symmetric positive definite.
    pub fn cholesky(&self) -> Option<Self> {
        if !self.is_square() {
            return None;
        }
        let n = self.rows;
        let mut l = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let mut sum = self[(i, j)];
                for k in 0..j {
                    sum -= l[(i, k)] * l[(j, k)];
                }
                if i == j {
                    if !(sum > T::zero()) {
                        return None;
                    }
                    l[(i, i)] = sum.sqrt();
                } else {
                    l[(i, j)] = sum / l[(j, j)];
                }
            }
        }
        Some(l)
    }

    pub fn is_positive_definite(&self) -> bool {
        self.symmetry_residual() <= self.max_abs() * T::lit(1e-12) && self.cholesky().is_some()
    }

    /// Matrix exponential by scaling and squaring of a truncated Taylor series.
    pub fn exp(&self) -> Self {
        assert!(self.is_square(), "exp requires a square matrix");
        let n = self.rows;
        let norm = (0..n)
            .map(|i| self.row(i).iter().fold(T::zero(), |s, x| s + x.abs()))
            .fold(T::zero(), T::max);
        let mut squarings = 0u32;
        let mut scaled_norm = norm;
        while scaled_norm > T::lit(0.5) {
            scaled_norm /= T::lit(2.0);
            squarings += 1;
        }
        let a = self.scale(T::one() / T::lit(2.0).powi(squarings as i32));
        let mut result = Self::identity(n);
        let mut term = Self::identity(n);
        for k in 1..=24 {
            term = &term * &a;
            term = term.scale(T::one() / T::from_count(k));
            result = &result + &term;
            if term.max_abs() <= T::epsilon() * result.max_abs() * T::lit(1e-2) {
                break;
            }
        }
        for _ in 0..squarings {
            result = &result * &result;
        }
        result
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mul for &Matrix<T> {
    type Output = Matrix<T>;
    fn mul(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, rhs.rows, "matrix product shape mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == T::zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl<T: Real> Add for &Matrix<T> {
    type Output = Matrix<T>;
    fn add(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &Matrix<T> {
    type Output = Matrix<T>;
    fn sub(self, rhs: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl<T: Real> Neg for &Matrix<T> {
    type Output = Matrix<T>;
    fn neg(self) -> Matrix<T> {
        self.scale(-T::one())
    }
}

/// Complex matrix stored as a pair of real matrices `re + i im`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix<T> {
    pub re: Matrix<T>,
    pub im: Matrix<T>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn new(re: Matrix<T>, im: Matrix<T>) -> Self {
        assert_eq!((re.rows(), re.cols()), (im.rows(), im.cols()));
        Self { re, im }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::new(Matrix::zeros(rows, cols), Matrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self::new(Matrix::identity(n), Matrix::zeros(n, n))
    }

    pub fn from_real(re: Matrix<T>) -> Self {
        let im = Matrix::zeros(re.rows(), re.cols());
        Self { re, im }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex<T>) -> Self {
        let mut out = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                let z = f(i, j);
                out.re[(i, j)] = z.re;
                out.im[(i, j)] = z.im;
            }
        }
        out
    }

    pub fn from_rows(rows: &[Vec<Complex<T>>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        Self::from_fn(r, c, |i, j| rows[i][j])
    }

    pub fn rows(&self) -> usize {
        self.re.rows()
    }

    pub fn cols(&self) -> usize {
        self.re.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        Complex::new(self.re[(i, j)], self.im[(i, j)])
    }

    pub fn transpose(&self) -> Self {
        Self::new(self.re.transpose(), self.im.transpose())
    }

    pub fn adjoint(&self) -> Self {
        Self::new(self.re.transpose(), -&self.im.transpose())
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        Self::new(
            &self.re.scale(s.re) - &self.im.scale(s.im),
            &self.re.scale(s.im) + &self.im.scale(s.re),
        )
    }

    pub fn mul_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(self.cols(), v.len());
        (0..self.rows())
            .map(|i| (0..self.cols()).fold(Complex::new(T::zero(), T::zero()), |acc, j| acc + self.get(i, j) * v[j]))
            .collect()
    }

    /// Real representation `[[re, -im], [im, re]]` acting on `(x, y)` with `z = x + i y`.
    pub fn to_real_representation(&self) -> Matrix<T> {
        Matrix::from_blocks(&self.re, &-&self.im, &self.im, &self.re)
    }

    /// Inverse through the real representation.
    pub fn inverse(&self) -> Option<Self> {
        if self.rows() != self.cols() {
            return None;
        }
        let n = self.rows();
        let inv = self.to_real_representation().inverse()?;
        Some(Self::new(inv.block(0, 0, n, n), inv.block(n, 0, n, n)))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return T::infinity();
        }
        let mut m = T::zero();
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                m = m.max((self.get(i, j) - other.get(i, j)).norm());
            }
        }
        m
    }

    pub fn hermitian_residual(&self) -> T {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }
}

impl<T: Real> Mul for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn mul(self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        ComplexMatrix::new(
            &(&self.re * &rhs.re) - &(&self.im * &rhs.im),
            &(&self.re * &rhs.im) + &(&self.im * &rhs.re),
        )
    }
}

impl<T: Real> Add for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn add(self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        ComplexMatrix::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl<T: Real> Sub for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn sub(self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
        ComplexMatrix::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn inverse_roundtrip() {
        let m = Matrix::from_rows(&[vec![4.0, 1.0, 0.5], vec![0.0, 3.0, -1.0], vec![2.0, 0.0, 1.0]]);
        let inv = m.inverse().unwrap();
        assert!((&m * &inv).max_abs_diff(&Matrix::identity(3)) < 1e-14);
    }

    #[test]
    fn singular_has_no_inverse() {
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(m.inverse().is_none());
        assert!(Matrix::<f64>::zeros(2, 2).inverse().is_none());
    }

    #[test]
    fn cholesky_detects_indefinite() {
        let pd = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let indef = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]);
        assert!(pd.is_positive_definite());
        assert!(!indef.is_positive_definite());
    }

    #[test]
    fn exp_of_rotation_generator() {
        let t = 1.3_f64;
        let gen = Matrix::from_rows(&[vec![0.0, -t], vec![t, 0.0]]);
        let e = gen.exp();
        assert_abs_diff_eq!(e[(0, 0)], t.cos(), epsilon = 1e-14);
        assert_abs_diff_eq!(e[(1, 0)], t.sin(), epsilon = 1e-14);
    }

    #[test]
    fn exp_of_large_diagonal() {
        let e = Matrix::from_diagonal(&[3.0, -2.0]).exp();
        assert_abs_diff_eq!(e[(0, 0)], 3.0_f64.exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(e[(1, 1)], (-2.0_f64).exp(), epsilon = 1e-15);
    }

    #[test]
    fn complex_inverse() {
        let m = ComplexMatrix::from_rows(&[
            vec![Complex::new(1.0, 1.0), Complex::new(0.0, 2.0)],
            vec![Complex::new(-1.0, 0.0), Complex::new(3.0, -1.0)],
        ]);
        let inv = m.inverse().unwrap();
        assert!((&m * &inv).max_abs_diff(&ComplexMatrix::identity(2)) < 1e-14);
    }
}
