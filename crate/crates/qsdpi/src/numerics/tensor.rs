use num_complex::Complex;
use num_traits::Zero;

use super::matrix::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

fn digits(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = idx % dims[k];
        idx /= dims[k];
    }
    out
}

fn check_dims<T: Real>(x: &ComplexMatrix<T>, dims: &[usize]) -> Result<usize> {
    let total: usize = dims.iter().product();
    if !x.is_square() || x.rows() != total {
        return Err(Error::DimensionMismatch(format!(
            "matrix {}x{} does not factor as {:?}",
            x.rows(),
            x.cols(),
            dims
        )));
    }
    Ok(total)
}

/// Traces out every factor not listed in `keep`; kept factors stay in their original order.
pub fn partial_trace<T: Real>(
    x: &ComplexMatrix<T>,
    dims: &[usize],
    keep: &[usize],
) -> Result<ComplexMatrix<T>> {
    let total = check_dims(x, dims)?;
    if let Some(&bad) = keep.iter().find(|&&k| k >= dims.len()) {
        return Err(Error::DimensionMismatch(format!(
            "factor index {bad} out of range for {:?}",
            dims
        )));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !kept.contains(k)).collect();
    let dk: usize = kept.iter().map(|&k| dims[k]).product();
    let dt: usize = traced.iter().map(|&k| dims[k]).product();
    // full[a * dt + t] is the flat index whose kept digits spell a and traced digits spell t
    let mut full = vec![0usize; dk * dt];
    for idx in 0..total {
        let d = digits(idx, dims);
        let a = kept.iter().fold(0, |acc, &k| acc * dims[k] + d[k]);
        let t = traced.iter().fold(0, |acc, &k| acc * dims[k] + d[k]);
        full[a * dt + t] = idx;
    }
    let mut out = ComplexMatrix::zeros(dk, dk);
    for a in 0..dk {
        for b in 0..dk {
            let mut s = Complex::<T>::zero();
            for t in 0..dt {
                s += x[(full[a * dt + t], full[b * dt + t])];
            }
            out[(a, b)] = s;
        }
    }
    Ok(out)
}

/// Reorders tensor factors: factor `perm[k]` of the input becomes factor `k` of the output.
pub fn permute_subsystems<T: Real>(
    x: &ComplexMatrix<T>,
    dims: &[usize],
    perm: &[usize],
) -> Result<ComplexMatrix<T>> {
    let total = check_dims(x, dims)?;
    let mut sorted = perm.to_vec();
    sorted.sort_unstable();
    if sorted != (0..dims.len()).collect::<Vec<_>>() {
        return Err(Error::DimensionMismatch(format!(
            "{:?} is not a permutation of the factors",
            perm
        )));
    }
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let map: Vec<usize> = (0..total)
        .map(|idx| {
            let d = digits(idx, dims);
            perm.iter()
                .zip(&new_dims)
                .fold(0, |acc, (&p, &nd)| acc * nd + d[p])
        })
        .collect();
    let mut out = ComplexMatrix::zeros(total, total);
    for i in 0..total {
        for j in 0..total {
            out[(map[i], map[j])] = x[(i, j)];
        }
    }
    Ok(out)
}

pub fn kron_all<T: Real>(factors: &[ComplexMatrix<T>]) -> ComplexMatrix<T> {
    let mut it = factors.iter();
    let first = it
        .next()
        .cloned()
        .unwrap_or_else(|| ComplexMatrix::identity(1));
    it.fold(first, |acc, f| acc.kron(f))
}
