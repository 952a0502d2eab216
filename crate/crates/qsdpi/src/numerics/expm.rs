use num_complex::Complex;

use super::linalg::lu;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

const THETA13: f64 = 5.371920351148152;

fn one_norm<T: Real>(a: &ComplexMatrix<T>) -> T {
    (0..a.cols()).fold(T::zero(), |m, j| {
        m.max((0..a.rows()).fold(T::zero(), |s, i| s + a[(i, j)].norm()))
    })
}

/// Matrix exponential by scaling and squaring with a degree-13 Padé approximant.
pub fn expm<T: Real>(a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("expm of non-square matrix".into()));
    }
    let n = a.rows();
    let norm = one_norm(a).to_f64().unwrap_or(f64::INFINITY);
    if !norm.is_finite() {
        return Err(Error::NumericalFailure("expm of non-finite matrix".into()));
    }
    let s = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as i32
    } else {
        0
    };
    let a = a.scale_re(T::lit(2f64.powi(-s)));
    let b = |k: usize| Complex::new(T::lit(PADE13[k]), T::zero());
    let id = ComplexMatrix::identity(n);
    let a2 = a.matmul(&a);
    let a4 = a2.matmul(&a2);
    let a6 = a4.matmul(&a2);

    let mut u_inner = a6.scale(b(13));
    u_inner.axpy(b(11), &a4);
    u_inner.axpy(b(9), &a2);
    let mut u = a6.matmul(&u_inner);
    u.axpy(b(7), &a6);
    u.axpy(b(5), &a4);
    u.axpy(b(3), &a2);
    u.axpy(b(1), &id);
    let u = a.matmul(&u);

    let mut v_inner = a6.scale(b(12));
    v_inner.axpy(b(10), &a4);
    v_inner.axpy(b(8), &a2);
    let mut v = a6.matmul(&v_inner);
    v.axpy(b(6), &a6);
    v.axpy(b(4), &a4);
    v.axpy(b(2), &a2);
    v.axpy(b(0), &id);

    let p = &v + &u;
    let q = &v - &u;
    let q_inv = lu(&q)?.inverse();
    let mut r = q_inv.matmul(&p);
    for _ in 0..s {
        r = r.matmul(&r);
    }
    Ok(r)
}
