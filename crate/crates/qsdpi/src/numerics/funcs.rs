use super::eig::{eigh, HermitianEig};
use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Relative eigenvalue threshold below which an eigenvalue counts as zero for support decisions.
pub const DEFAULT_CLIP_REL: f64 = 1e-10;

/// How eigenvalues under the clip threshold are treated by a matrix function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ZeroPolicy {
    /// Evaluate `f` on the raw eigenvalue; a non-finite result is an error.
    Strict,
    /// Treat clipped eigenvalues as outside the support: the result is 0 there.
    Exclude,
    /// Replace `f` on clipped eigenvalues by a fixed value.
    Value(f64),
    /// Evaluate `f` at the clip threshold instead of the raw eigenvalue.
    ClampToThreshold,
}

/// Absolute clip threshold for a spectrum: `rel` times the largest eigenvalue magnitude.
pub fn clip_threshold<T: Real>(eigenvalues: &[T], rel: T) -> T {
    let top = eigenvalues.iter().fold(T::zero(), |m, &x| m.max(x.abs()));
    rel * top
}

/// Applies `f` to the spectrum of an existing decomposition.
pub fn apply_on_eig<T: Real>(
    eig: &HermitianEig<T>,
    f: impl Fn(T) -> T,
    policy: ZeroPolicy,
    clip_rel: T,
) -> Result<ComplexMatrix<T>> {
    let thr = clip_threshold(&eig.eigenvalues, clip_rel);
    let mut g = Vec::with_capacity(eig.dim());
    for &lam in &eig.eigenvalues {
        let clipped = lam.abs() <= thr;
        let val = match (clipped, policy) {
            (false, _) => f(lam),
            (true, ZeroPolicy::Strict) => f(lam),
            (true, ZeroPolicy::Exclude) => T::zero(),
            (true, ZeroPolicy::Value(v)) => T::lit(v),
            (true, ZeroPolicy::ClampToThreshold) => f(thr.max(T::min_positive_value())),
        };
        if !val.is_finite() {
            return Err(Error::FunctionUndefined(lam.to_f64().unwrap_or(f64::NAN)));
        }
        g.push(val);
    }
    Ok(eig.compose(&g))
}

/// V f(Λ) V† for Hermitian A.
pub fn hermitian_matrix_function<T: Real>(
    a: &ComplexMatrix<T>,
    f: impl Fn(T) -> T,
    policy: ZeroPolicy,
) -> Result<ComplexMatrix<T>> {
    let eig = eigh(a)?;
    apply_on_eig(&eig, f, policy, T::lit(DEFAULT_CLIP_REL))
}

/// Square root of a PSD matrix, tiny negative eigenvalues set to zero.
pub fn sqrtm_psd<T: Real>(a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    hermitian_matrix_function(a, |x| x.max(T::zero()).sqrt(), ZeroPolicy::Exclude)
}

/// A^s on the support of A (pseudo-power for negative s).
pub fn powm_support<T: Real>(a: &ComplexMatrix<T>, s: T) -> Result<ComplexMatrix<T>> {
    hermitian_matrix_function(a, |x| x.powf(s), ZeroPolicy::Exclude)
}

/// Moore-Penrose pseudo-inverse of a Hermitian matrix.
pub fn pinv_hermitian<T: Real>(a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let eig = eigh(a)?;
    let thr = clip_threshold(&eig.eigenvalues, T::lit(DEFAULT_CLIP_REL));
    let g: Vec<T> = eig
        .eigenvalues
        .iter()
        .map(|&x| {
            if x.abs() <= thr {
                T::zero()
            } else {
                T::one() / x
            }
        })
        .collect();
    Ok(eig.compose(&g))
}

/// Natural logarithm on the support.
pub fn logm_support<T: Real>(a: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    hermitian_matrix_function(a, |x| x.ln(), ZeroPolicy::Exclude)
}

/// Schatten p-norm of a Hermitian matrix.
pub fn schatten_norm_hermitian<T: Real>(a: &ComplexMatrix<T>, p: T) -> Result<T> {
    let ev = eigh(a)?.eigenvalues;
    if p.is_infinite() {
        return Ok(ev.iter().fold(T::zero(), |m, &x| m.max(x.abs())));
    }
    Ok(ev
        .iter()
        .fold(T::zero(), |s, &x| s + x.abs().powf(p))
        .powf(T::one() / p))
}

/// Trace norm of a Hermitian matrix.
pub fn trace_norm_hermitian<T: Real>(a: &ComplexMatrix<T>) -> Result<T> {
    Ok(eigh(a)?
        .eigenvalues
        .iter()
        .fold(T::zero(), |s, &x| s + x.abs()))
}

/// Trace norm of an arbitrary square matrix via the singular values.
pub fn trace_norm<T: Real>(a: &ComplexMatrix<T>) -> Result<T> {
    let ata = a.adjoint().matmul(a);
    Ok(eigh(&ata)?
        .eigenvalues
        .iter()
        .fold(T::zero(), |s, &x| s + x.max(T::zero()).sqrt()))
}

/// Largest singular value.
pub fn operator_norm<T: Real>(a: &ComplexMatrix<T>) -> Result<T> {
    let ata = if a.rows() >= a.cols() {
        a.adjoint().matmul(a)
    } else {
        a.matmul(&a.adjoint())
    };
    Ok(eigh(&ata)?.max_eigenvalue().max(T::zero()).sqrt())
}

/// Schatten p-norm |X|_p = (tr |X|^p)^{1/p} for general X.
pub fn schatten_norm<T: Real>(a: &ComplexMatrix<T>, p: T) -> Result<T> {
    let ata = a.adjoint().matmul(a);
    let ev = eigh(&ata)?.eigenvalues;
    if p.is_infinite() {
        return Ok(ev
            .first()
            .copied()
            .unwrap_or_else(T::zero)
            .max(T::zero())
            .sqrt());
    }
    let half = p / T::lit(2.0);
    Ok(ev
        .iter()
        .fold(T::zero(), |s, &x| s + x.max(T::zero()).powf(half))
        .powf(T::one() / p))
}
