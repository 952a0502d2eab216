use num_complex::Complex;
use num_traits::{One, Zero};

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// LU factorization with partial pivoting, PA = LU packed into one matrix.
pub struct Lu<T: Real> {
    lu: ComplexMatrix<T>,
    perm: Vec<usize>,
}

pub fn lu<T: Real>(a: &ComplexMatrix<T>) -> Result<Lu<T>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("LU of non-square matrix".into()));
    }
    let n = a.rows();
    let mut m = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let scale = a.max_abs().max(T::min_positive_value());
    for k in 0..n {
        let mut piv = k;
        let mut best = m[(k, k)].norm();
        for i in (k + 1)..n {
            let v = m[(i, k)].norm();
            if v > best {
                best = v;
                piv = i;
            }
        }
        if best <= scale * T::epsilon() * T::lit(n as f64) {
            return Err(Error::NotInvertible(format!("pivot {k} vanishes")));
        }
        if piv != k {
            perm.swap(k, piv);
            for j in 0..n {
                let t = m[(k, j)];
                m[(k, j)] = m[(piv, j)];
                m[(piv, j)] = t;
            }
        }
        let d = m[(k, k)];
        for i in (k + 1)..n {
            let f = m[(i, k)] / d;
            m[(i, k)] = f;
            if f.is_zero() {
                continue;
            }
            for j in (k + 1)..n {
                let u = m[(k, j)];
                m[(i, j)] -= f * u;
            }
        }
    }
    Ok(Lu { lu: m, perm })
}

impl<T: Real> Lu<T> {
    pub fn solve_vec(&self, b: &[Complex<T>]) -> Vec<Complex<T>> {
        let n = self.perm.len();
        let mut y: Vec<Complex<T>> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            for k in 0..i {
                let l = self.lu[(i, k)];
                y[i] = y[i] - l * y[k];
            }
        }
        for i in (0..n).rev() {
            for k in (i + 1)..n {
                let u = self.lu[(i, k)];
                y[i] = y[i] - u * y[k];
            }
            y[i] = y[i] / self.lu[(i, i)];
        }
        y
    }

    pub fn inverse(&self) -> ComplexMatrix<T> {
        let n = self.perm.len();
        let mut out = ComplexMatrix::zeros(n, n);
        for j in 0..n {
            let mut e = vec![Complex::<T>::zero(); n];
            e[j] = Complex::<T>::one();
            let x = self.solve_vec(&e);
            for i in 0..n {
                out[(i, j)] = x[i];
            }
        }
        out
    }
}

pub fn inverse<T: Real>(a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    Ok(lu(a)?.inverse())
}

/// Lower Cholesky factor of a Hermitian positive definite matrix; `None` if not PD.
pub fn cholesky<T: Real>(a: &ComplexMatrix<T>) -> Option<ComplexMatrix<T>> {
    let n = a.rows();
    let mut l = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d > T::zero()) {
            return None;
        }
        let djj = d.sqrt();
        l[(j, j)] = Complex::new(djj, T::zero());
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = s / djj;
        }
    }
    Some(l)
}

/// Inverse of a lower-triangular matrix.
pub fn lower_triangular_inverse<T: Real>(l: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let n = l.rows();
    let mut inv = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        inv[(j, j)] = Complex::<T>::one() / l[(j, j)];
        for i in (j + 1)..n {
            let mut s = Complex::<T>::zero();
            for k in j..i {
                s += l[(i, k)] * inv[(k, j)];
            }
            inv[(i, j)] = -s / l[(i, i)];
        }
    }
    inv
}

/// Solves the real symmetric positive definite system M x = b (row-major M).
///
/// Falls back to a pivoted LU when Cholesky breaks down.
pub fn solve_real_spd(m: &[f64], n: usize, b: &[f64]) -> Result<Vec<f64>> {
    if let Some(x) = cholesky_solve_real(m, n, b) {
        return Ok(x);
    }
    lu_solve_real(m, n, b)
}

fn cholesky_solve_real(m: &[f64], n: usize, b: &[f64]) -> Option<Vec<f64>> {
    let mut l = vec![0.0; n * n];
    for j in 0..n {
        let mut d = m[j * n + j];
        for k in 0..j {
            d -= l[j * n + k] * l[j * n + k];
        }
        if !(d > 0.0) {
            return None;
        }
        let djj = d.sqrt();
        l[j * n + j] = djj;
        for i in (j + 1)..n {
            let mut s = m[i * n + j];
            for k in 0..j {
                s -= l[i * n + k] * l[j * n + k];
            }
            l[i * n + j] = s / djj;
        }
    }
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l[i * n + k] * y[k];
        }
        y[i] /= l[i * n + i];
    }
    for i in (0..n).rev() {
        for k in (i + 1)..n {
            y[i] -= l[k * n + i] * y[k];
        }
        y[i] /= l[i * n + i];
    }
    Some(y)
}

pub fn lu_solve_real(m: &[f64], n: usize, b: &[f64]) -> Result<Vec<f64>> {
    let mut a = m.to_vec();
    let mut x = b.to_vec();
    let scale = a
        .iter()
        .fold(0.0f64, |s, v| s.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    for k in 0..n {
        let mut piv = k;
        for i in (k + 1)..n {
            if a[i * n + k].abs() > a[piv * n + k].abs() {
                piv = i;
            }
        }
        if a[piv * n + k].abs() <= scale * 1e-15 {
            return Err(Error::NumericalFailure(format!(
                "singular linear system at column {k}"
            )));
        }
        if piv != k {
            for j in 0..n {
                a.swap(k * n + j, piv * n + j);
            }
            x.swap(k, piv);
        }
        for i in (k + 1)..n {
            let f = a[i * n + k] / a[k * n + k];
            if f == 0.0 {
                continue;
            }
            for j in k..n {
                a[i * n + j] -= f * a[k * n + j];
            }
            x[i] -= f * x[k];
        }
    }
    for i in (0..n).rev() {
        for j in (i + 1)..n {
            x[i] -= a[i * n + j] * x[j];
        }
        x[i] /= a[i * n + i];
    }
    Ok(x)
}

/// Eigenvalues of a general complex matrix (Hessenberg reduction + shifted QR).
pub fn eigenvalues_general<T: Real>(a: &ComplexMatrix<T>) -> Result<Vec<Complex<T>>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(
            "eigenvalues of non-square matrix".into(),
        ));
    }
    let n = a.rows();
    let mut h = a.clone();
    hessenberg(&mut h);
    let eps = T::epsilon();
    let mut out = vec![Complex::<T>::zero(); n];
    let mut hi = n;
    let mut iter = 0usize;
    while hi > 0 {
        if hi == 1 {
            out[0] = h[(0, 0)];
            break;
        }
        // deflation search
        let mut l = hi - 1;
        while l > 0 {
            let s = h[(l - 1, l - 1)].norm() + h[(l, l)].norm();
            let s = if s == T::zero() { h.max_abs() } else { s };
            if h[(l, l - 1)].norm() <= eps * s {
                h[(l, l - 1)] = Complex::<T>::zero();
                break;
            }
            l -= 1;
        }
        if l == hi - 1 {
            out[hi - 1] = h[(hi - 1, hi - 1)];
            hi -= 1;
            iter = 0;
            continue;
        }
        iter += 1;
        if iter > 300 {
            return Err(Error::NumericalFailure(
                "QR eigenvalue iteration did not converge".into(),
            ));
        }
        let shift = if iter % 11 == 0 {
            // exceptional shift
            h[(hi - 1, hi - 1)] + Complex::new(h[(hi - 1, hi - 2)].norm(), T::zero())
        } else {
            wilkinson(
                h[(hi - 2, hi - 2)],
                h[(hi - 2, hi - 1)],
                h[(hi - 1, hi - 2)],
                h[(hi - 1, hi - 1)],
            )
        };
        qr_step(&mut h, l, hi, shift);
    }
    Ok(out)
}

fn hessenberg<T: Real>(h: &mut ComplexMatrix<T>) {
    let n = h.rows();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<Complex<T>> = ((k + 1)..n).map(|i| h[(i, k)]).collect();
        let alpha_norm = x.iter().fold(T::zero(), |s, z| s + z.norm_sqr()).sqrt();
        if alpha_norm == T::zero() {
            continue;
        }
        let phase = if x[0].norm() > T::zero() {
            x[0] / x[0].norm()
        } else {
            Complex::<T>::one()
        };
        let mut v = x.clone();
        v[0] += phase * alpha_norm;
        let vn = v.iter().fold(T::zero(), |s, z| s + z.norm_sqr()).sqrt();
        if vn == T::zero() {
            continue;
        }
        for z in v.iter_mut() {
            *z = *z / vn;
        }
        // H ← (I − 2vv†) H (I − 2vv†) on rows/cols k+1..n
        for j in 0..n {
            let mut s = Complex::<T>::zero();
            for (idx, i) in ((k + 1)..n).enumerate() {
                s += v[idx].conj() * h[(i, j)];
            }
            for (idx, i) in ((k + 1)..n).enumerate() {
                let d = v[idx] * s * T::lit(2.0);
                h[(i, j)] -= d;
            }
        }
        for i in 0..n {
            let mut s = Complex::<T>::zero();
            for (idx, j) in ((k + 1)..n).enumerate() {
                s += h[(i, j)] * v[idx];
            }
            for (idx, j) in ((k + 1)..n).enumerate() {
                let d = s * v[idx].conj() * T::lit(2.0);
                h[(i, j)] -= d;
            }
        }
    }
}

fn wilkinson<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> Complex<T> {
    let tr = a + d;
    let det = a * d - b * c;
    let half = tr * T::lit(0.5);
    let disc = (half * half - det).sqrt();
    let l1 = half + disc;
    let l2 = half - disc;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One explicit shifted QR step on the active window [lo, hi) via Givens rotations.
fn qr_step<T: Real>(h: &mut ComplexMatrix<T>, lo: usize, hi: usize, shift: Complex<T>) {
    let n = h.rows();
    for i in lo..hi {
        h[(i, i)] -= shift;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for k in lo..(hi - 1) {
        let a = h[(k, k)];
        let b = h[(k + 1, k)];
        let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
        let (c, s) = if r == T::zero() {
            (Complex::<T>::one(), Complex::<T>::zero())
        } else {
            (a / r, b / r)
        };
        // G = [[c̄, s̄], [−s, c]] applied to rows k, k+1
        for j in k..n {
            let x = h[(k, j)];
            let y = h[(k + 1, j)];
            h[(k, j)] = c.conj() * x + s.conj() * y;
            h[(k + 1, j)] = -s * x + c * y;
        }
        rots.push((c, s));
    }
    for (idx, k) in (lo..(hi - 1)).enumerate() {
        let (c, s) = rots[idx];
        // right-multiply by G†
        for i in 0..(k + 2).min(n) {
            let x = h[(i, k)];
            let y = h[(i, k + 1)];
            h[(i, k)] = x * c + y * s;
            h[(i, k + 1)] = -x * s.conj() + y * c.conj();
        }
    }
    for i in lo..hi {
        h[(i, i)] += shift;
    }
}

/// Spectral radius of a general complex matrix.
pub fn spectral_radius<T: Real>(a: &ComplexMatrix<T>) -> Result<T> {
    Ok(eigenvalues_general(a)?
        .iter()
        .fold(T::zero(), |m, z| m.max(z.norm())))
}
