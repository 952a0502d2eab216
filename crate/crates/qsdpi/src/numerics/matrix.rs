use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Dense complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix<T: Real> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> ComplexMatrix<T> {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if rows * cols != data.len() {
            return Err(Error::DimensionMismatch(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("non-finite matrix entry".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::<T>::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex::<T>::one();
        }
        m
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize) -> Complex<T>,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real(rows: usize, cols: usize, vals: &[T]) -> Result<Self> {
        Self::new(
            rows,
            cols,
            vals.iter().map(|&x| Complex::new(x, T::zero())).collect(),
        )
    }

    /// Diagonal matrix with the given real entries.
    pub fn diag(vals: &[T]) -> Self {
        let n = vals.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in vals.iter().enumerate() {
            m.data[i * n + i] = Complex::new(v, T::zero());
        }
        m
    }

    pub fn diag_complex(vals: &[Complex<T>]) -> Self {
        let n = vals.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in vals.iter().enumerate() {
            m.data[i * n + i] = v;
        }
        m
    }

    /// Projector |i⟩⟨i| in dimension `n`.
    pub fn basis_projector(n: usize, i: usize) -> Self {
        Self::unit(n, i, i)
    }

    /// Matrix unit |i⟩⟨j|.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m.data[i * n + j] = Complex::<T>::one();
        m
    }

    /// Column vector from entries.
    pub fn column(v: &[Complex<T>]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    /// Rank-one operator |u⟩⟨v|.
    pub fn outer(u: &[Complex<T>], v: &[Complex<T>]) -> Self {
        Self::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn dim(&self) -> usize {
        debug_assert!(self.is_square());
        self.rows
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[Complex<T>] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<Complex<T>> {
        self.data
    }

    pub fn col(&self, j: usize) -> Vec<Complex<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn row(&self, i: usize) -> &[Complex<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn diagonal(&self) -> Vec<Complex<T>> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)])
            .collect()
    }

    pub fn real_diagonal(&self) -> Vec<T> {
        self.diagonal().into_iter().map(|z| z.re).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| f(z)).collect(),
        }
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.rows.min(self.cols)).fold(Complex::<T>::zero(), |acc, i| acc + self[(i, i)])
    }

    pub fn scale(&self, c: Complex<T>) -> Self {
        self.map(|z| z * c)
    }

    pub fn scale_re(&self, c: T) -> Self {
        self.map(|z| z * c)
    }

    pub fn matmul(&self, rhs: &Self) -> Self {
        assert_eq!(
            self.cols, rhs.rows,
            "matmul shape mismatch {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        let (n, m, p) = (self.rows, self.cols, rhs.cols);
        let mut out = vec![Complex::<T>::zero(); n * p];
        for i in 0..n {
            let orow = &mut out[i * p..(i + 1) * p];
            for k in 0..m {
                let a = self.data[i * m + k];
                if a.is_zero() {
                    continue;
                }
                let rrow = &rhs.data[k * p..(k + 1) * p];
                for (o, &b) in orow.iter_mut().zip(rrow) {
                    *o += a * b;
                }
            }
        }
        Self {
            rows: n,
            cols: p,
            data: out,
        }
    }

    pub fn try_matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        Ok(self.matmul(rhs))
    }

    /// A X A†.
    pub fn conjugate_by(&self, a: &Self) -> Self {
        a.matmul(self).matmul(&a.adjoint())
    }

    /// Kronecker product self ⊗ rhs.
    pub fn kron(&self, rhs: &Self) -> Self {
        let (r, c) = (self.rows * rhs.rows, self.cols * rhs.cols);
        let mut out = Self::zeros(r, c);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a.is_zero() {
                    continue;
                }
                for k in 0..rhs.rows {
                    for l in 0..rhs.cols {
                        out.data[(i * rhs.rows + k) * c + j * rhs.cols + l] = a * rhs[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(&self, rhs: &Self) -> Self {
        let mut out = Self::zeros(self.rows + rhs.rows, self.cols + rhs.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(i, j)] = self[(i, j)];
            }
        }
        for i in 0..rhs.rows {
            for j in 0..rhs.cols {
                out[(self.rows + i, self.cols + j)] = rhs[(i, j)];
            }
        }
        out
    }

    pub fn submatrix(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn norm_fro(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
            .sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    /// Hilbert-Schmidt inner product Tr(A† B).
    pub fn hs_inner(&self, rhs: &Self) -> Complex<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        self.data
            .iter()
            .zip(&rhs.data)
            .fold(Complex::<T>::zero(), |acc, (a, b)| acc + a.conj() * b)
    }

    /// Real part of Tr(A† B), the inner product on Hermitian matrices.
    pub fn inner_re(&self, rhs: &Self) -> T {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        self.data
            .iter()
            .zip(&rhs.data)
            .fold(T::zero(), |acc, (a, b)| acc + a.re * b.re + a.im * b.im)
    }

    /// Tr(A B) without forming the product.
    pub fn trace_product(&self, rhs: &Self) -> Complex<T> {
        assert_eq!(self.cols, rhs.rows);
        assert_eq!(self.rows, rhs.cols);
        let mut acc = Complex::<T>::zero();
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self.data[i * self.cols + k] * rhs.data[k * rhs.cols + i];
            }
        }
        acc
    }

    pub fn hermiticity_error(&self) -> T {
        if !self.is_square() {
            return T::infinity();
        }
        let n = self.rows;
        let mut err = T::zero();
        for i in 0..n {
            for j in i..n {
                err = err.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        err
    }

    /// Hermitian within `tol` relative to max(1, max |entry|).
    pub fn is_hermitian(&self, tol: T) -> bool {
        self.is_square() && self.hermiticity_error() <= tol * T::one().max(self.max_abs())
    }

    pub fn hermitian_part(&self) -> Self {
        let a = self.adjoint();
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + a[(i, j)]) * T::lit(0.5)
        })
    }

    pub fn is_zero_within(&self, tol: T) -> bool {
        self.max_abs() <= tol
    }

    pub fn approx_eq(&self, rhs: &Self, tol: T) -> bool {
        self.rows == rhs.rows && self.cols == rhs.cols && (self - rhs).max_abs() <= tol
    }

    pub fn cast<U: Real>(&self) -> ComplexMatrix<U> {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .map(|z| Complex::new(U::from(z.re).unwrap(), U::from(z.im).unwrap()))
                .collect(),
        }
    }

    /// Row-major vectorization, vec(X)[i·cols + j] = X_ij.
    pub fn vectorize(&self) -> Vec<Complex<T>> {
        self.data.clone()
    }

    pub fn from_vec(rows: usize, cols: usize, v: Vec<Complex<T>>) -> Self {
        assert_eq!(rows * cols, v.len());
        Self {
            rows,
            cols,
            data: v,
        }
    }

    pub fn mul_vec(&self, v: &[Complex<T>]) -> Vec<Complex<T>> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(Complex::<T>::zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }
}

impl<T: Real> Index<(usize, usize)> for ComplexMatrix<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for ComplexMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        &mut self.data[i * self.cols + j]
    }
}

fn zip_with<T: Real>(
    a: &ComplexMatrix<T>,
    b: &ComplexMatrix<T>,
    f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>,
) -> ComplexMatrix<T> {
    assert_eq!(
        (a.rows, a.cols),
        (b.rows, b.cols),
        "elementwise shape mismatch"
    );
    ComplexMatrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(&x, &y)| f(x, y)).collect(),
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl<T: Real> $tr<&ComplexMatrix<T>> for &ComplexMatrix<T> {
            type Output = ComplexMatrix<T>;
            fn $m(self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
                $body(self, rhs)
            }
        }
        impl<T: Real> $tr<ComplexMatrix<T>> for ComplexMatrix<T> {
            type Output = ComplexMatrix<T>;
            fn $m(self, rhs: ComplexMatrix<T>) -> ComplexMatrix<T> {
                $body(&self, &rhs)
            }
        }
        impl<T: Real> $tr<&ComplexMatrix<T>> for ComplexMatrix<T> {
            type Output = ComplexMatrix<T>;
            fn $m(self, rhs: &ComplexMatrix<T>) -> ComplexMatrix<T> {
                $body(&self, rhs)
            }
        }
        impl<T: Real> $tr<ComplexMatrix<T>> for &ComplexMatrix<T> {
            type Output = ComplexMatrix<T>;
            fn $m(self, rhs: ComplexMatrix<T>) -> ComplexMatrix<T> {
                $body(self, &rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| zip_with(a, b, |x, y| x + y));
binop!(Sub, sub, |a, b| zip_with(a, b, |x, y| x - y));
binop!(Mul, mul, |a: &ComplexMatrix<T>, b: &ComplexMatrix<T>| a
    .matmul(b));

impl<T: Real> Neg for ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn neg(self) -> ComplexMatrix<T> {
        self.map(|z| -z)
    }
}

impl<T: Real> Neg for &ComplexMatrix<T> {
    type Output = ComplexMatrix<T>;
    fn neg(self) -> ComplexMatrix<T> {
        self.map(|z| -z)
    }
}

impl<T: Real> AddAssign<&ComplexMatrix<T>> for ComplexMatrix<T> {
    fn add_assign(&mut self, rhs: &ComplexMatrix<T>) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += *b;
        }
    }
}

impl<T: Real> SubAssign<&ComplexMatrix<T>> for ComplexMatrix<T> {
    fn sub_assign(&mut self, rhs: &ComplexMatrix<T>) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= *b;
        }
    }
}

impl<T: Real> ComplexMatrix<T> {
    /// self += c · rhs
    pub fn axpy(&mut self, c: Complex<T>, rhs: &Self) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += c * b;
        }
    }
}
