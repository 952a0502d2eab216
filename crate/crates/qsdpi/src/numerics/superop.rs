use super::funcs::operator_norm;
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Matrix of X ↦ Σ K X K† acting on row-major vectorized operators.
pub fn superop_from_kraus<T: Real>(kraus: &[ComplexMatrix<T>]) -> ComplexMatrix<T> {
    let (r, c) = (kraus[0].rows(), kraus[0].cols());
    let mut s = ComplexMatrix::zeros(r * r, c * c);
    for k in kraus {
        s += &k.kron(&k.conj());
    }
    s
}

/// Matrix of an arbitrary linear map given by its action on matrix units.
pub fn superop_from_fn<T: Real>(
    d_in: usize,
    d_out: usize,
    f: impl Fn(&ComplexMatrix<T>) -> ComplexMatrix<T>,
) -> ComplexMatrix<T> {
    let mut s = ComplexMatrix::zeros(d_out * d_out, d_in * d_in);
    for i in 0..d_in {
        for j in 0..d_in {
            let y = f(&ComplexMatrix::unit(d_in, i, j));
            let col = i * d_in + j;
            for a in 0..d_out {
                for b in 0..d_out {
                    s[(a * d_out + b, col)] = y[(a, b)];
                }
            }
        }
    }
    s
}

/// Applies a superoperator matrix to a d_in×d_in operator.
pub fn apply_superop<T: Real>(s: &ComplexMatrix<T>, x: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let d_out = isqrt(s.rows());
    ComplexMatrix::from_vec(d_out, d_out, s.mul_vec(x.data()))
}

fn isqrt(n: usize) -> usize {
    (n as f64).sqrt().round() as usize
}

/// Largest singular value of a superoperator, i.e. its 2→2 operator norm in Hilbert-Schmidt geometry.
pub fn superop_two_two_norm<T: Real>(s: &ComplexMatrix<T>) -> Result<T> {
    let d = isqrt(s.cols());
    let e = isqrt(s.rows());
    if d * d != s.cols() || e * e != s.rows() || s.rows() == 0 {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} is not a superoperator on vectorized square operators",
            s.rows(),
            s.cols()
        )));
    }
    operator_norm(s)
}

/// Superoperator of Φ⊗Ψ from the superoperators of Φ and Ψ.
pub fn superop_tensor<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let (da_out, da_in) = (isqrt(a.rows()), isqrt(a.cols()));
    let (db_out, db_in) = (isqrt(b.rows()), isqrt(b.cols()));
    let d_in = da_in * db_in;
    let d_out = da_out * db_out;
    let mut s = ComplexMatrix::zeros(d_out * d_out, d_in * d_in);
    // (Φ⊗Ψ)(|i k⟩⟨j l|) = Φ(|i⟩⟨j|) ⊗ Ψ(|k⟩⟨l|)
    for i in 0..da_in {
        for j in 0..da_in {
            for k in 0..db_in {
                for l in 0..db_in {
                    let col = (i * db_in + k) * d_in + (j * db_in + l);
                    let ca = i * da_in + j;
                    let cb = k * db_in + l;
                    for a1 in 0..da_out {
                        for a2 in 0..da_out {
                            let va = a[(a1 * da_out + a2, ca)];
                            if va.norm_sqr() == T::zero() {
                                continue;
                            }
                            for b1 in 0..db_out {
                                for b2 in 0..db_out {
                                    let row = (a1 * db_out + b1) * d_out + (a2 * db_out + b2);
                                    s[(row, col)] = va * b[(b1 * db_out + b2, cb)];
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    s
}
