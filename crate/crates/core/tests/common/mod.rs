#![allow(dead_code)]

use forge_core::cgraph::DegreeTwoInput;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random PSD matrix with unit diagonal: normalized Gram matrix of `n` Gaussian
/// vectors in dimension `rank`.
pub fn random_correlation(n: usize, rank: usize, seed: u64) -> DMatrix<f64> {
    let mut r = rng(seed);
    let mut v = DMatrix::from_fn(rank, n, |_, _| r.sample::<f64, _>(StandardNormal));
    for j in 0..n {
        let norm = v.column(j).norm();
        v.column_mut(j).scale_mut(1.0 / norm);
    }
    v.transpose() * v
}

pub fn random_symmetric(n: usize, seed: u64) -> DMatrix<f64> {
    let mut r = rng(seed);
    let a = DMatrix::from_fn(n, n, |_, _| r.sample::<f64, _>(StandardNormal));
    (&a + a.transpose()) * 0.5
}

pub fn input(n: usize, rank: usize, seed: u64) -> DegreeTwoInput {
    DegreeTwoInput::new_psd(random_correlation(n, rank, seed)).unwrap()
}

/// All tuples in `[n]^k`.
pub fn tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let total = n.pow(k as u32);
    (0..total)
        .map(|mut x| {
            let mut t = vec![0; k];
            for slot in t.iter_mut().rev() {
                *slot = x % n;
                x /= n;
            }
            t
        })
        .collect()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}
