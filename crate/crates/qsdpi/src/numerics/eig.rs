use num_complex::Complex;
use num_traits::Zero;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Eigendecomposition A = V diag(λ) V† of a Hermitian matrix, eigenvalues descending.
#[derive(Clone, Debug)]
pub struct HermitianEig<T: Real> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: ComplexMatrix<T>,
}

impl<T: Real> HermitianEig<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn max_eigenvalue(&self) -> T {
        self.eigenvalues.first().copied().unwrap_or_else(T::zero)
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues.last().copied().unwrap_or_else(T::zero)
    }

    pub fn vector(&self, k: usize) -> Vec<Complex<T>> {
        self.eigenvectors.col(k)
    }

    /// V diag(g) V† for already-transformed eigenvalues.
    pub fn compose(&self, g: &[T]) -> ComplexMatrix<T> {
        let n = self.dim();
        let v = &self.eigenvectors;
        let mut out = ComplexMatrix::zeros(n, n);
        for k in 0..n {
            let w = g[k];
            if w == T::zero() {
                continue;
            }
            for i in 0..n {
                let vi = v[(i, k)] * w;
                if vi.is_zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += vi * v[(j, k)].conj();
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        self.compose(&self.eigenvalues)
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// Jacobi is slower than tridiagonal QR but gives high relative accuracy on
/// small eigenvalues, which matters for support decisions.
pub fn eigh<T: Real>(a: &ComplexMatrix<T>) -> Result<HermitianEig<T>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eigh of non-square {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if !a.is_hermitian(T::herm_tol()) {
        return Err(Error::NonHermitian(
            a.hermiticity_error().to_f64().unwrap_or(f64::NAN),
        ));
    }
    Ok(jacobi(a.hermitian_part()))
}

/// Eigenvalues only, descending.
pub fn eigvalsh<T: Real>(a: &ComplexMatrix<T>) -> Result<Vec<T>> {
    eigh(a).map(|e| e.eigenvalues)
}

fn jacobi<T: Real>(mut a: ComplexMatrix<T>) -> HermitianEig<T> {
    let n = a.rows();
    let mut v = ComplexMatrix::identity(n);
    let total = a.norm_fro();
    if n > 1 && total > T::zero() {
        let eps = T::epsilon();
        for _sweep in 0..100 {
            let mut off = T::zero();
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[(p, q)].norm_sqr();
                }
            }
            if off.sqrt() <= eps * total * T::lit(0.1) {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    rotate(&mut a, &mut v, p, q, eps * total);
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    idx.sort_by(|&i, &j| {
        diag[j]
            .partial_cmp(&diag[i])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let eigenvalues = idx.iter().map(|&i| diag[i]).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |r, c| v[(r, idx[c])]);
    HermitianEig {
        eigenvalues,
        eigenvectors,
    }
}

fn rotate<T: Real>(
    a: &mut ComplexMatrix<T>,
    v: &mut ComplexMatrix<T>,
    p: usize,
    q: usize,
    floor: T,
) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag <= floor * T::lit(1e-3) {
        return;
    }
    let n = a.rows();
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (T::lit(2.0) * mag);
    let t = if tau >= T::zero() {
        T::one() / (tau + (T::one() + tau * tau).sqrt())
    } else {
        -T::one() / (-tau + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;
    let e = apq / mag;
    // R = [[c, s], [-s·ē, c·ē]] on the (p, q) plane; A ← R† A R.
    let rpp = Complex::new(c, T::zero());
    let rpq = Complex::new(s, T::zero());
    let rqp = -e.conj() * s;
    let rqq = e.conj() * c;
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * rpp + akq * rqp;
        a[(k, q)] = akp * rpq + akq * rqq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = rpp.conj() * apk + rqp.conj() * aqk;
        a[(q, k)] = rpq.conj() * apk + rqq.conj() * aqk;
    }
    a[(p, q)] = Complex::<T>::zero();
    a[(q, p)] = Complex::<T>::zero();
    a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
    a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * rpp + vkq * rqp;
        v[(k, q)] = vkp * rpq + vkq * rqq;
    }
}
