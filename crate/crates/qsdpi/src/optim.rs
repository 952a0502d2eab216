//! Derivative-free maximisation over density-matrix coordinates.
//!
//! States are parameterised as ρ = LL†/tr LL† with L an arbitrary complex d×d matrix,
//! stored as 2d² real coordinates (real parts first, then imaginary parts).

use rand::Rng;

use crate::numerics::sqrtm_psd;
use crate::random::{gaussian_complex, stream_rng};
use crate::{c64, CMat, Result};

/// ρ = LL†/tr LL† over real coordinates of L.
#[derive(Clone, Debug)]
pub struct StateParameterization {
    pub dim: usize,
    pub factor: CMat,
    pub coords: Vec<f64>,
}

impl StateParameterization {
    pub fn n_coords(dim: usize) -> usize {
        2 * dim * dim
    }

    pub fn from_coords(dim: usize, coords: &[f64]) -> Self {
        let n = dim * dim;
        let factor = CMat::from_fn(dim, dim, |r, c| {
            let k = r * dim + c;
            c64(coords[k], coords[n + k])
        });
        Self {
            dim,
            factor,
            coords: coords.to_vec(),
        }
    }

    /// Coordinates of √ρ, which decode back to ρ.
    pub fn from_state(rho: &CMat) -> Result<Self> {
        let dim = rho.rows();
        let l = sqrtm_psd(&rho.hermitian_part())?;
        let mut coords = vec![0.0; 2 * dim * dim];
        for (k, z) in l.data().iter().enumerate() {
            coords[k] = z.re;
            coords[dim * dim + k] = z.im;
        }
        Ok(Self::from_coords(dim, &coords))
    }

    pub fn random<R: Rng>(dim: usize, rng: &mut R) -> Self {
        let n = dim * dim;
        let mut coords = vec![0.0; 2 * n];
        for k in 0..n {
            let z = gaussian_complex(rng);
            coords[k] = z.re;
            coords[n + k] = z.im;
        }
        Self::from_coords(dim, &coords)
    }

    /// Decoded state; a vanishing factor decodes to the maximally mixed state.
    pub fn state(&self) -> CMat {
        let m = self.factor.matmul(&self.factor.adjoint()).hermitian_part();
        let t = m.trace().re;
        if !(t > 1e-300) {
            return CMat::identity(self.dim).scale_re(1.0 / self.dim as f64);
        }
        m.scale_re(1.0 / t)
    }

    pub fn decode(dim: usize, coords: &[f64]) -> CMat {
        Self::from_coords(dim, coords).state()
    }
}

/// Result of a local search.
#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    /// Step size (ascent) or simplex spread (Nelder-Mead) fell below tolerance.
    pub converged: bool,
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

/// Coordinate ascent with an adaptive step: grow on success, halve after a failed sweep.
pub fn coordinate_ascent(
    f: &dyn Fn(&[f64]) -> f64,
    x0: &[f64],
    step: f64,
    min_step: f64,
    max_evals: usize,
) -> SearchOutcome {
    let mut x = x0.to_vec();
    let mut fx = sanitize(f(&x));
    let mut evals = 1;
    let mut h = step;
    while h >= min_step && evals < max_evals && fx < f64::INFINITY {
        let mut improved = false;
        for k in 0..x.len() {
            for dir in [1.0, -1.0] {
                let old = x[k];
                x[k] = old + dir * h;
                let v = sanitize(f(&x));
                evals += 1;
                if v > fx {
                    fx = v;
                    improved = true;
                    break;
                }
                x[k] = old;
            }
            if evals >= max_evals {
                break;
            }
        }
        h *= if improved { 1.2 } else { 0.5 };
    }
    SearchOutcome {
        x,
        value: fx,
        evaluations: evals,
        converged: h < min_step,
    }
}

/// Nelder-Mead maximisation from an axis-aligned simplex of size `scale`.
pub fn nelder_mead(
    f: &dyn Fn(&[f64]) -> f64,
    x0: &[f64],
    scale: f64,
    ftol: f64,
    max_evals: usize,
) -> SearchOutcome {
    let n = x0.len();
    // Work with g = −f so the textbook minimisation steps apply.
    let g = |x: &[f64]| -sanitize(f(x));
    let mut pts: Vec<Vec<f64>> = vec![x0.to_vec()];
    for k in 0..n {
        let mut p = x0.to_vec();
        p[k] += scale;
        pts.push(p);
    }
    let mut vals: Vec<f64> = pts.iter().map(|p| g(p)).collect();
    let mut evals = n + 1;
    let mut converged = false;
    while evals < max_evals {
        let mut idx: Vec<usize> = (0..=n).collect();
        idx.sort_by(|&a, &b| vals[a].total_cmp(&vals[b]));
        pts = idx.iter().map(|&i| pts[i].clone()).collect();
        vals = idx.iter().map(|&i| vals[i]).collect();
        let (best, worst) = (vals[0], vals[n]);
        if best == f64::NEG_INFINITY
            || (worst.is_finite() && (worst - best).abs() <= ftol * (best.abs() + 1e-12))
        {
            converged = true;
            break;
        }
        let mut centroid = vec![0.0; n];
        for p in &pts[..n] {
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / n as f64;
            }
        }
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&pts[n])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let xr = along(1.0);
        let fr = g(&xr);
        evals += 1;
        if fr < vals[0] {
            let xe = along(2.0);
            let fe = g(&xe);
            evals += 1;
            if fe < fr {
                pts[n] = xe;
                vals[n] = fe;
            } else {
                pts[n] = xr;
                vals[n] = fr;
            }
        } else if fr < vals[n - 1] {
            pts[n] = xr;
            vals[n] = fr;
        } else {
            let t = if fr < vals[n] { 0.5 } else { -0.5 };
            let xc = along(t);
            let fc = g(&xc);
            evals += 1;
            if fc < vals[n].min(fr) {
                pts[n] = xc;
                vals[n] = fc;
            } else {
                for i in 1..=n {
                    let shrunk: Vec<f64> = pts[0]
                        .iter()
                        .zip(&pts[i])
                        .map(|(b, p)| b + 0.5 * (p - b))
                        .collect();
                    vals[i] = g(&shrunk);
                    pts[i] = shrunk;
                }
                evals += n;
            }
        }
    }
    let k = (0..=n)
        .min_by(|&a, &b| vals[a].total_cmp(&vals[b]))
        .unwrap_or(0);
    SearchOutcome {
        x: pts[k].clone(),
        value: -vals[k],
        evaluations: evals,
        converged,
    }
}

/// Budget for one local search.
#[derive(Clone, Copy, Debug)]
pub struct LocalOptions {
    pub step: f64,
    pub min_step: f64,
    pub ascent_evals: usize,
    pub polish_evals: usize,
    pub ftol: f64,
}

impl Default for LocalOptions {
    fn default() -> Self {
        Self {
            step: 0.25,
            min_step: 1e-6,
            ascent_evals: 4000,
            polish_evals: 1500,
            ftol: 1e-12,
        }
    }
}

/// Coordinate ascent followed by a Nelder-Mead polish; keeps whichever is better.
pub fn maximize(f: &dyn Fn(&[f64]) -> f64, x0: &[f64], opts: &LocalOptions) -> SearchOutcome {
    let a = coordinate_ascent(f, x0, opts.step, opts.min_step, opts.ascent_evals);
    if a.value == f64::INFINITY || opts.polish_evals == 0 {
        return a;
    }
    let b = nelder_mead(f, &a.x, 10.0 * opts.min_step.max(1e-4), opts.ftol, opts.polish_evals);
    let evaluations = a.evaluations + b.evaluations;
    if b.value > a.value {
        SearchOutcome {
            evaluations,
            converged: a.converged || b.converged,
            ..b
        }
    } else {
        SearchOutcome { evaluations, ..a }
    }
}

/// Best of several local searches, run on scoped threads.
///
/// The reduction is by value with the lowest start index winning ties, so the result does
/// not depend on how many threads run.
pub fn multi_start(
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    starts: &[Vec<f64>],
    opts: &LocalOptions,
) -> Option<(usize, SearchOutcome, usize)> {
    if starts.is_empty() {
        return None;
    }
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(starts.len());
    let mut results: Vec<Option<SearchOutcome>> = vec![None; starts.len()];
    std::thread::scope(|s| {
        let chunks: Vec<_> = results
            .chunks_mut(starts.len().div_ceil(workers))
            .enumerate()
            .map(|(c, slot)| {
                let size = starts.len().div_ceil(workers);
                s.spawn(move || {
                    for (i, r) in slot.iter_mut().enumerate() {
                        *r = Some(maximize(f, &starts[c * size + i], opts));
                    }
                })
            })
            .collect();
        for h in chunks {
            h.join().expect("search thread panicked");
        }
    });
    let total: usize = results
        .iter()
        .map(|r| r.as_ref().map_or(0, |o| o.evaluations))
        .sum();
    let mut best: Option<(usize, SearchOutcome)> = None;
    for (i, r) in results.into_iter().enumerate() {
        let r = r.expect("every start searched");
        if best.as_ref().map_or(true, |(_, b)| r.value > b.value) {
            best = Some((i, r));
        }
    }
    best.map(|(i, o)| (i, o, total))
}

/// Random start coordinates for restart `index`.
pub fn random_start(n_coords: usize, seed: u64, index: u64) -> Vec<f64> {
    let mut rng = stream_rng(seed, index);
    (0..n_coords)
        .map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal))
        .collect()
}
