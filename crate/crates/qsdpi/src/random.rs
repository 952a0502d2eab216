//! Seeded sampling of states, unitaries and channels.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{c64, CMat, C64};

/// Deterministic RNG for stream `index` derived from `seed`.
pub fn stream_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub fn gaussian_complex<R: Rng>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64(re, im)
}

pub fn ginibre<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> CMat {
    CMat::from_fn(rows, cols, |_, _| gaussian_complex(rng))
}

/// Haar-random pure state vector.
pub fn random_pure_vector<R: Rng>(d: usize, rng: &mut R) -> Vec<C64> {
    let v: Vec<C64> = (0..d).map(|_| gaussian_complex(rng)).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

pub fn random_pure_state<R: Rng>(d: usize, rng: &mut R) -> CMat {
    let v = random_pure_vector(d, rng);
    CMat::outer(&v, &v)
}

/// Random density matrix GG†/tr with G of the given rank (Hilbert-Schmidt measure for full rank).
pub fn random_density<R: Rng>(d: usize, rank: usize, rng: &mut R) -> CMat {
    let g = ginibre(d, rank.max(1), rng);
    let m = g.matmul(&g.adjoint());
    let t = m.trace().re;
    m.scale_re(1.0 / t)
}

/// Random full-rank density matrix.
pub fn random_full_rank_density<R: Rng>(d: usize, rng: &mut R) -> CMat {
    random_density(d, d, rng)
}

/// Haar unitary via Gram-Schmidt on a Ginibre matrix.
pub fn random_unitary<R: Rng>(d: usize, rng: &mut R) -> CMat {
    let g = ginibre(d, d, rng);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d);
    for j in 0..d {
        let mut v = g.col(j);
        for u in &cols {
            let p: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= p * ui;
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|z| z / n).collect());
    }
    CMat::from_fn(d, d, |i, j| cols[j][i])
}

/// Random isometry-derived Kraus operators of a channel d_in → d_out with `n_kraus` operators.
pub fn random_kraus<R: Rng>(d_in: usize, d_out: usize, n_kraus: usize, rng: &mut R) -> Vec<CMat> {
    let big = d_out * n_kraus;
    let g = ginibre(big, d_in, rng);
    // orthonormalize columns → isometry V: C^{d_in} → C^{d_out ⊗ n_kraus}
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(d_in);
    for j in 0..d_in {
        let mut v = g.col(j);
        for u in &cols {
            let p: C64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            for (vi, ui) in v.iter_mut().zip(u) {
                *vi -= p * ui;
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|z| z / n).collect());
    }
    (0..n_kraus)
        .map(|k| CMat::from_fn(d_out, d_in, |a, j| cols[j][a * n_kraus + k]))
        .collect()
}
